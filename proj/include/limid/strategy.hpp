#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "limid/diagram.hpp"
#include "limid/paths.hpp"

namespace limid {

/// Z_j: one chosen alternative per information state of decision node `owner`.
struct LocalStrategy {
  NodeId owner = 0;
  std::vector<StateIndex> choices;

  bool operator==(const LocalStrategy&) const = default;
};

/// Z = (Z_j), one local strategy per decision node in decision_nodes() order.
struct Strategy {
  std::vector<LocalStrategy> locals;

  bool operator==(const Strategy&) const = default;
};

/// Strategy choosing `choice` (clamped to the state range) everywhere.
Strategy uniform_strategy(const InfluenceDiagram& diagram, StateIndex choice = 0);

/// Raises InvalidStrategy unless the strategy is total and in range.
void validate_strategy(const InfluenceDiagram& diagram, const Strategy& strategy);

/// Π_j |S_j|^{|S_I(j)|}, saturating.
std::uint64_t strategy_space_size(const InfluenceDiagram& diagram);

/// `states` is a full path in topological order.
bool is_compatible(const InfluenceDiagram& diagram, const Strategy& strategy, std::span<const StateIndex> states);
bool is_compatible(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& strategy,
                   std::size_t path);

enum class Reduction {
  Sequential,  // path index order, the reference result
  Vectorized,  // dispatched dot kernel; agrees with Sequential to rounding
};

/// Σ_{s ∈ S*, compatible} p(s)·U(s).
double expected_utility(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& strategy,
                        Reduction reduction = Reduction::Sequential);

/// Σ_{s ∈ S*, compatible} p(s). Equals 1 when no removed path carries mass.
double compatible_mass(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& strategy);

/// Independent uniform choice per (j, s_I(j)), reproducible from the seed.
Strategy random_strategy(const InfluenceDiagram& diagram, std::uint64_t seed);

}  // namespace limid
