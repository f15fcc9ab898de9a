#include "limid/error.hpp"

namespace limid {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::SelfReference: return "SelfReference";
    case ErrorCode::UnknownParent: return "UnknownParent";
    case ErrorCode::ValueParent: return "ValueParent";
    case ErrorCode::WrongKind: return "WrongKind";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::IncompleteUtilities: return "IncompleteUtilities";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::MissingTensor: return "MissingTensor";
    case ErrorCode::Frozen: return "Frozen";
    case ErrorCode::NotFrozen: return "NotFrozen";
    case ErrorCode::UnknownState: return "UnknownState";
    case ErrorCode::EmptyStateSpace: return "EmptyStateSpace";
    case ErrorCode::PathExplosion: return "PathExplosion";
    case ErrorCode::StrategySpaceTooLarge: return "StrategySpaceTooLarge";
    case ErrorCode::InvalidStrategy: return "InvalidStrategy";
    case ErrorCode::EmptyPathTable: return "EmptyPathTable";
    case ErrorCode::ModelMismatch: return "ModelMismatch";
    case ErrorCode::NameCollision: return "NameCollision";
    case ErrorCode::NotOneHot: return "NotOneHot";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::DegenerateTest: return "DegenerateTest";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + (detail.empty() ? "" : " " + detail)),
      code_(code) {}

}  // namespace limid
