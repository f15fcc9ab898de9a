#include "limid/strategy.hpp"

#include <algorithm>
#include <random>

#include "limid/error.hpp"
#include "limid/kernels.hpp"

namespace limid {
namespace {

void require_frozen(const InfluenceDiagram& diagram) {
  if (!diagram.frozen()) throw Error(ErrorCode::NotFrozen, "diagram must be frozen");
}

std::vector<double> compatibility_mask(const InfluenceDiagram& diagram, const PathTable& table,
                                       const Strategy& strategy) {
  std::vector<double> mask(table.size(), 1.0);
  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const auto info = table.decision_info(d);
    const auto own = table.column(diagram.position(decisions[d]));
    const auto& choices = strategy.locals[d].choices;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (choices[info[i]] != own[i]) mask[i] = 0.0;
    }
  }
  return mask;
}

}  // namespace

Strategy uniform_strategy(const InfluenceDiagram& diagram, StateIndex choice) {
  require_frozen(diagram);
  Strategy z;
  for (NodeId j : diagram.decision_nodes()) {
    const auto last = static_cast<StateIndex>(diagram.state_count(j) - 1);
    z.locals.push_back({j, std::vector<StateIndex>(diagram.info_state_count(j), std::min(choice, last))});
  }
  return z;
}

void validate_strategy(const InfluenceDiagram& diagram, const Strategy& strategy) {
  require_frozen(diagram);
  const auto decisions = diagram.decision_nodes();
  if (strategy.locals.size() != decisions.size()) {
    throw Error(ErrorCode::InvalidStrategy, "expected " + std::to_string(decisions.size()) + " local strategies");
  }
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const auto& local = strategy.locals[d];
    const auto& name = diagram.node(decisions[d]).name;
    if (local.owner != decisions[d]) throw Error(ErrorCode::InvalidStrategy, "local strategy order at " + name);
    if (local.choices.size() != diagram.info_state_count(decisions[d])) {
      throw Error(ErrorCode::InvalidStrategy, "local strategy of " + name + " is not total");
    }
    for (StateIndex c : local.choices) {
      if (c >= diagram.state_count(decisions[d])) throw Error(ErrorCode::InvalidStrategy, "choice out of range at " + name);
    }
  }
}

std::uint64_t strategy_space_size(const InfluenceDiagram& diagram) {
  require_frozen(diagram);
  std::uint64_t total = 1;
  for (NodeId j : diagram.decision_nodes()) {
    for (std::uint64_t k = 0; k < diagram.info_state_count(j); ++k) {
      total = saturating_mul(total, diagram.state_count(j));
    }
  }
  return total;
}

bool is_compatible(const InfluenceDiagram& diagram, const Strategy& strategy, std::span<const StateIndex> states) {
  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    std::vector<StateIndex> parent_states;
    for (NodeId p : diagram.parents(j)) parent_states.push_back(states[diagram.position(p)]);
    const auto info = diagram.info_state_index(j, parent_states);
    if (strategy.locals[d].choices[info] != states[diagram.position(j)]) return false;
  }
  return true;
}

bool is_compatible(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& strategy,
                   std::size_t path) {
  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const auto info = table.decision_info(d)[path];
    if (strategy.locals[d].choices[info] != table.state(path, diagram.position(decisions[d]))) return false;
  }
  return true;
}

double expected_utility(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& strategy,
                        Reduction reduction) {
  validate_strategy(diagram, strategy);
  const auto mask = compatibility_mask(diagram, table, strategy);
  if (reduction == Reduction::Vectorized) return kernels::dot(table.weights(), mask);
  const auto w = table.weights();
  double eu = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (mask[i] != 0.0) eu += w[i];
  }
  return eu;
}

double compatible_mass(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& strategy) {
  validate_strategy(diagram, strategy);
  const auto mask = compatibility_mask(diagram, table, strategy);
  const auto p = table.probabilities();
  double mass = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (mask[i] != 0.0) mass += p[i];
  }
  return mass;
}

Strategy random_strategy(const InfluenceDiagram& diagram, std::uint64_t seed) {
  require_frozen(diagram);
  std::mt19937_64 rng(seed);
  Strategy z;
  for (NodeId j : diagram.decision_nodes()) {
    std::uniform_int_distribution<StateIndex> pick(0, static_cast<StateIndex>(diagram.state_count(j) - 1));
    LocalStrategy local{j, std::vector<StateIndex>(diagram.info_state_count(j))};
    for (auto& c : local.choices) c = pick(rng);
    z.locals.push_back(std::move(local));
  }
  return z;
}

}  // namespace limid
