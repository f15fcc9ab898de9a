#include "limid/paths.hpp"

#include <algorithm>
#include <limits>

#include "limid/error.hpp"
#include "limid/kernels.hpp"

namespace limid {
namespace {

void require_frozen(const InfluenceDiagram& diagram) {
  if (!diagram.frozen()) throw Error(ErrorCode::NotFrozen, "diagram must be frozen");
}

void require_decision(const InfluenceDiagram& diagram, NodeId id) {
  if (diagram.node(id).kind != NodeKind::Decision) {
    throw Error(ErrorCode::WrongKind, diagram.node(id).name + " is not a decision node");
  }
}

// Row index of `id`'s information state on every path of the table.
std::vector<std::uint64_t> info_rows(const InfluenceDiagram& diagram,
                                     const std::vector<std::vector<StateIndex>>& columns, std::size_t count,
                                     NodeId id) {
  std::vector<std::uint64_t> rows(count, 0);
  const auto parents = diagram.parents(id);
  const auto strides = diagram.info_strides(id);
  for (std::size_t k = 0; k < parents.size(); ++k) {
    const auto& col = columns[diagram.position(parents[k])];
    const std::uint64_t stride = strides[k];
    for (std::size_t i = 0; i < count; ++i) rows[i] += col[i] * stride;
  }
  return rows;
}

// Compiled filter: per position, a membership mask for each term.
struct CompiledPattern {
  std::vector<std::pair<std::size_t, std::vector<bool>>> terms;

  bool matches(std::span<const StateIndex> digits) const {
    for (const auto& [pos, allowed] : terms) {
      if (!allowed[digits[pos]]) return false;
    }
    return true;
  }
};

void check_path_node(const InfluenceDiagram& diagram, NodeId id, const char* what) {
  if (id >= diagram.node_count()) throw Error(ErrorCode::InvalidParams, std::string(what) + " references no node");
  if (diagram.node(id).kind == NodeKind::Value) {
    throw Error(ErrorCode::InvalidParams, std::string(what) + " references value node " + diagram.node(id).name);
  }
}

}  // namespace

ForbiddenPattern make_pattern(const InfluenceDiagram& diagram,
                              const std::vector<std::pair<std::string, std::vector<std::string>>>& terms) {
  if (terms.empty()) throw Error(ErrorCode::InvalidParams, "forbidden pattern has no terms");
  ForbiddenPattern pattern;
  for (const auto& [name, states] : terms) {
    const NodeId id = diagram.id(name);
    check_path_node(diagram, id, "forbidden pattern");
    PatternTerm term{id, {}};
    for (const auto& s : states) {
      auto idx = diagram.find_state(id, s);
      if (!idx) throw Error(ErrorCode::UnknownState, s + " of " + name);
      term.states.push_back(*idx);
    }
    pattern.terms.push_back(std::move(term));
  }
  return pattern;
}

Pin make_pin(const InfluenceDiagram& diagram, const std::string& node, const std::string& state) {
  const NodeId id = diagram.id(node);
  check_path_node(diagram, id, "pin");
  auto idx = diagram.find_state(id, state);
  if (!idx) throw Error(ErrorCode::UnknownState, state + " of " + node);
  return Pin{id, *idx};
}

std::vector<StateIndex> PathTable::path(std::size_t index) const {
  std::vector<StateIndex> states(columns_.size());
  for (std::size_t k = 0; k < columns_.size(); ++k) states[k] = columns_[k].at(index);
  return states;
}

PathTable enumerate_paths(const InfluenceDiagram& diagram, const EnumerationOptions& options) {
  require_frozen(diagram);
  const auto order = diagram.order();
  const std::size_t width = order.size();
  const std::uint64_t total = diagram.path_count();
  if (total > options.path_cap) {
    throw Error(ErrorCode::PathExplosion,
                "|S| = " + (total == std::numeric_limits<std::uint64_t>::max() ? std::string(">2^64")
                                                                                : std::to_string(total)) +
                    " exceeds the cap " + std::to_string(options.path_cap));
  }
  if (total > static_cast<std::uint64_t>(std::numeric_limits<std::int32_t>::max())) {
    throw Error(ErrorCode::PathExplosion, "|S| exceeds 32-bit path indexing");
  }

  std::vector<std::int64_t> pinned(width, -1);
  bool contradictory_pins = false;
  for (const auto& pin : options.pins) {
    check_path_node(diagram, pin.node, "pin");
    if (pin.state >= diagram.state_count(pin.node)) {
      throw Error(ErrorCode::UnknownState, "pin state out of range for " + diagram.node(pin.node).name);
    }
    auto& slot = pinned[diagram.position(pin.node)];
    if (slot >= 0 && slot != pin.state) contradictory_pins = true;
    slot = pin.state;
  }
  std::vector<CompiledPattern> patterns;
  for (const auto& pattern : options.forbidden) {
    if (pattern.terms.empty()) throw Error(ErrorCode::InvalidParams, "forbidden pattern has no terms");
    CompiledPattern compiled;
    for (const auto& term : pattern.terms) {
      check_path_node(diagram, term.node, "forbidden pattern");
      std::vector<bool> allowed(diagram.state_count(term.node), false);
      for (StateIndex s : term.states) {
        if (s >= allowed.size()) {
          throw Error(ErrorCode::UnknownState, "pattern state out of range for " + diagram.node(term.node).name);
        }
        allowed[s] = true;
      }
      compiled.terms.emplace_back(diagram.position(term.node), std::move(allowed));
    }
    patterns.push_back(std::move(compiled));
  }

  PathTable table;
  table.unfiltered_ = total;
  table.columns_.assign(width, {});
  std::vector<std::size_t> radix(width);
  for (std::size_t k = 0; k < width; ++k) radix[k] = diagram.state_count(order[k]);

  // Mixed-radix counter, last position fastest: lexicographic order.
  std::vector<StateIndex> digits(width, 0);
  std::size_t kept = 0;
  for (std::uint64_t c = 0; c < total; ++c) {
    bool keep = !contradictory_pins;
    for (std::size_t k = 0; keep && k < width; ++k) {
      if (pinned[k] >= 0 && digits[k] != pinned[k]) keep = false;
    }
    for (std::size_t q = 0; keep && q < patterns.size(); ++q) {
      if (patterns[q].matches(digits)) keep = false;
    }
    if (keep) {
      for (std::size_t k = 0; k < width; ++k) table.columns_[k].push_back(digits[k]);
      ++kept;
    } else if (!table.removed_positive_mass_ && path_probability(diagram, digits) > 0.0) {
      table.removed_positive_mass_ = true;
    }
    for (std::size_t k = width; k-- > 0;) {
      if (++digits[k] < radix[k]) break;
      digits[k] = 0;
    }
  }

  // p(s): multiply the chance node conditionals in topological order.
  std::vector<double> prob(kept, 1.0);
  std::vector<double> factor(kept);
  std::vector<std::uint32_t> gather_index(kept);
  for (NodeId id : diagram.chance_nodes()) {
    const auto rows = info_rows(diagram, table.columns_, kept, id);
    const auto& own = table.columns_[diagram.position(id)];
    const std::uint64_t n_states = diagram.state_count(id);
    for (std::size_t i = 0; i < kept; ++i) {
      gather_index[i] = static_cast<std::uint32_t>(rows[i] * n_states + own[i]);
    }
    kernels::gather(diagram.probabilities(id), gather_index, factor);
    kernels::multiply(prob, factor);
  }

  // U(s): add the value node tables in declaration order.
  std::vector<double> util(kept, 0.0);
  for (NodeId id : diagram.value_nodes()) {
    const auto rows = info_rows(diagram, table.columns_, kept, id);
    for (std::size_t i = 0; i < kept; ++i) gather_index[i] = static_cast<std::uint32_t>(rows[i]);
    kernels::gather(diagram.utilities(id), gather_index, factor);
    kernels::add(util, factor);
  }

  std::vector<double> weights = prob;
  kernels::multiply(weights, util);

  for (NodeId id : diagram.decision_nodes()) {
    const auto rows = info_rows(diagram, table.columns_, kept, id);
    table.decision_info_.emplace_back(rows.begin(), rows.end());
  }

  table.probabilities_ = std::move(prob);
  table.utilities_ = std::move(util);
  table.weights_ = std::move(weights);
  if (table.removed_positive_mass_) {
    table.warnings_.push_back(
        "ForbiddenMassWarning: removed paths carry positive probability; probabilities are not renormalized");
  }
  return table;
}

double path_probability(const InfluenceDiagram& diagram, std::span<const StateIndex> states) {
  require_frozen(diagram);
  if (states.size() != diagram.order().size()) throw Error(ErrorCode::DimensionMismatch, "path length");
  double p = 1.0;
  for (NodeId id : diagram.order()) {
    if (diagram.node(id).kind != NodeKind::Chance) continue;
    std::uint64_t row = 0;
    const auto parents = diagram.parents(id);
    const auto strides = diagram.info_strides(id);
    for (std::size_t k = 0; k < parents.size(); ++k) row += states[diagram.position(parents[k])] * strides[k];
    p *= diagram.probabilities(id)[row * diagram.state_count(id) + states[diagram.position(id)]];
  }
  return p;
}

double path_utility(const InfluenceDiagram& diagram, std::span<const StateIndex> states) {
  require_frozen(diagram);
  if (states.size() != diagram.order().size()) throw Error(ErrorCode::DimensionMismatch, "path length");
  double u = 0.0;
  for (NodeId id : diagram.value_nodes()) {
    std::uint64_t row = 0;
    const auto parents = diagram.parents(id);
    const auto strides = diagram.info_strides(id);
    for (std::size_t k = 0; k < parents.size(); ++k) row += states[diagram.position(parents[k])] * strides[k];
    u += diagram.utilities(id)[row];
  }
  return u;
}

std::vector<std::size_t> locally_compatible_paths(const InfluenceDiagram& diagram, const PathTable& table,
                                                  NodeId decision, std::uint64_t info_state, StateIndex choice) {
  require_frozen(diagram);
  require_decision(diagram, decision);
  const auto info = table.decision_info(diagram.decision_slot(decision));
  const auto own = table.column(diagram.position(decision));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (info[i] == info_state && own[i] == choice) out.push_back(i);
  }
  return out;
}

std::uint64_t unfiltered_local_count(const InfluenceDiagram& diagram, NodeId decision) {
  require_frozen(diagram);
  require_decision(diagram, decision);
  return diagram.path_count() / (diagram.state_count(decision) * diagram.info_state_count(decision));
}

std::uint64_t active_local_count(const InfluenceDiagram& diagram, NodeId decision) {
  std::uint64_t count = unfiltered_local_count(diagram, decision);
  const auto parents = diagram.parents(decision);
  for (NodeId k : diagram.decision_nodes()) {
    if (k == decision || std::find(parents.begin(), parents.end(), k) != parents.end()) continue;
    count /= diagram.state_count(k);
  }
  return count;
}

std::vector<std::uint64_t> gamma_table(const InfluenceDiagram& diagram, const PathTable& table, NodeId decision) {
  require_frozen(diagram);
  require_decision(diagram, decision);
  const std::uint64_t n_states = diagram.state_count(decision);
  std::vector<std::uint64_t> counts(diagram.info_state_count(decision) * n_states, 0);
  const auto info = table.decision_info(diagram.decision_slot(decision));
  const auto own = table.column(diagram.position(decision));
  for (std::size_t i = 0; i < table.size(); ++i) ++counts[info[i] * n_states + own[i]];
  const std::uint64_t bound = active_local_count(diagram, decision);
  for (auto& c : counts) c = std::min(c, bound);
  return counts;
}

std::uint64_t gamma(const InfluenceDiagram& diagram, const PathTable& table, NodeId decision, StateIndex choice,
                    std::uint64_t info_state) {
  const std::uint64_t effective = locally_compatible_paths(diagram, table, decision, info_state, choice).size();
  return std::min(effective, active_local_count(diagram, decision));
}

}  // namespace limid
