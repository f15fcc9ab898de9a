#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "limid/diagram.hpp"
#include "limid/formulation.hpp"
#include "limid/paths.hpp"
#include "limid/strategy.hpp"

namespace limid {

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

inline constexpr std::size_t kMaxLineWidth = 255;
inline constexpr std::size_t kMaxNameLength = 255;

/// CPLEX LP dialect: Maximize / Subject To / Bounds / Binary / End.
std::string write_lp(const ModelIR& model);

/// Fixed-section MPS with OBJSENSE MAX; binaries are declared as BV bounds.
/// Fields are column-aligned for short names and whitespace-separated
/// otherwise (free-MPS name length rules).
std::string write_mps(const ModelIR& model);

/// `name value` lines for every variable, preceded by an `=obj=` line.
std::string write_solution(const ModelIR& model, const std::vector<double>& values);

struct SolutionReport {
  Strategy strategy;
  std::optional<double> file_objective;
  double expected_utility = 0.0;
  std::vector<std::string> warnings;
};

/// Reads `name value` lines (`#` starts a comment line), rounds the z-values
/// at 0.5 and rebuilds the strategy. Missing z-values count as 0.
SolutionReport read_solution(const ModelIR& model, const InfluenceDiagram& diagram, const PathTable& table,
                             std::string_view text);

}  // namespace limid
