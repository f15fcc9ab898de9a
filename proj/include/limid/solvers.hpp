#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "limid/diagram.hpp"
#include "limid/paths.hpp"
#include "limid/strategy.hpp"

namespace limid {

inline constexpr std::uint64_t kDefaultStrategyCap = std::uint64_t{1} << 22;
/// Minimum gain for a strategy to count as strictly better.
inline constexpr double kImprovementTolerance = 1e-12;

/// Strategies are ranked by compatible probability mass first, then by
/// expected utility. The mass only differs between strategies when removed
/// paths carry probability, which is exactly when the probability cut makes
/// some strategies infeasible in the MILP forms.
struct Score {
  double mass = 0.0;
  double expected_utility = 0.0;
};

/// True when `candidate` beats `incumbent` by more than kImprovementTolerance.
bool better(const Score& candidate, const Score& incumbent);

struct BruteForceResult {
  Strategy strategy;
  double expected_utility = 0.0;
  double mass = 0.0;
  std::uint64_t examined = 0;        // leaves of the enumeration
  std::uint64_t strategy_space = 0;  // Π_j |S_j|^{|S_I(j)|}, saturating
};

/**
 * Exact search over all strategies in lexicographic order of their encoding
 * (decision nodes in topological order, information states ascending).
 * Ties keep the lexicographically smallest strategy.
 *
 * Information states that no effective path reaches cannot change the
 * objective; they are fixed to the first alternative and not enumerated.
 * The last decision node with reachable information states is not
 * enumerated either: the objective is a sum over its information states,
 * so each leaf picks the best alternative per state. The cap applies to
 * the number of leaves.
 */
BruteForceResult brute_force(const InfluenceDiagram& diagram, const PathTable& table,
                             std::uint64_t cap = kDefaultStrategyCap);

struct Move {
  NodeId decision = 0;
  std::uint64_t info_state = 0;
  StateIndex from = 0;
  StateIndex to = 0;
  double old_eu = 0.0;
  double new_eu = 0.0;
  double old_mass = 0.0;
  double new_mass = 0.0;
};

struct SpuOptions {
  std::size_t max_sweeps = 100000;
};

struct SpuResult {
  Strategy strategy;
  double expected_utility = 0.0;
  double mass = 0.0;
  std::vector<Move> trace;
  std::size_t sweeps = 0;
  bool converged = true;
};

/// Single policy update: sweeps (j, s_I(j)) pairs in topological and
/// lexicographic order, switching to the best alternative when it is
/// strictly better, until a whole sweep changes nothing.
SpuResult spu(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& initial,
              const SpuOptions& options = {});

struct RestartSummary {
  std::uint64_t seed = 0;
  double initial_eu = 0.0;
  double final_eu = 0.0;
  std::size_t moves = 0;
};

struct MultiStartResult {
  SpuResult best;
  std::size_t best_restart = 0;
  std::vector<RestartSummary> restarts;
};

/// Seed of restart r; restart 0 uses `seed` itself.
std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart);

/// Runs spu from `restarts` random strategies. Restarts may run on
/// `threads` workers; the result does not depend on the thread count.
MultiStartResult spu_multistart(const InfluenceDiagram& diagram, const PathTable& table, std::size_t restarts,
                                std::uint64_t seed, std::size_t threads = 1, const SpuOptions& options = {});

struct OptimalityCheck {
  bool locally_optimal = true;
  std::optional<Move> improving;
};

/// True iff no single (j, s_I(j)) reassignment is strictly better.
OptimalityCheck local_optimality_check(const InfluenceDiagram& diagram, const PathTable& table,
                                       const Strategy& strategy);

}  // namespace limid
