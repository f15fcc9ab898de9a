#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace limid {

enum class ErrorCode {
  // diagram construction
  DuplicateName,
  SelfReference,
  UnknownParent,
  ValueParent,
  WrongKind,
  DimensionMismatch,
  NotNormalized,
  NegativeProbability,
  IncompleteUtilities,
  CycleDetected,
  MissingTensor,
  Frozen,
  NotFrozen,
  UnknownState,
  EmptyStateSpace,
  // enumeration and solving
  PathExplosion,
  StrategySpaceTooLarge,
  InvalidStrategy,
  // formulations and emission
  EmptyPathTable,
  ModelMismatch,
  NameCollision,
  NotOneHot,
  UnknownVariable,
  NonPositiveScale,
  // generators
  DegenerateTest,
  InvalidParams,
  // io
  ParseError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The message starts with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace limid
