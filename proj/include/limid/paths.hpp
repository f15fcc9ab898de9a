#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "limid/diagram.hpp"

namespace limid {

/// One node of a forbidden pattern: the node's state must be in `states`.
struct PatternTerm {
  NodeId node = 0;
  std::vector<StateIndex> states;
};

/// A path matches when every term matches (AND within a pattern).
struct ForbiddenPattern {
  std::vector<PatternTerm> terms;
};

/// Fixes a chance or decision node to one state.
struct Pin {
  NodeId node = 0;
  StateIndex state = 0;
};

/// Builds a pattern from node and state names; raises UnknownParent /
/// UnknownState for unresolved names and InvalidParams for an empty pattern
/// or a value node.
ForbiddenPattern make_pattern(const InfluenceDiagram& diagram,
                              const std::vector<std::pair<std::string, std::vector<std::string>>>& terms);
Pin make_pin(const InfluenceDiagram& diagram, const std::string& node, const std::string& state);

inline constexpr std::uint64_t kDefaultPathCap = std::uint64_t{1} << 24;

struct EnumerationOptions {
  std::vector<ForbiddenPattern> forbidden;
  std::vector<Pin> pins;
  std::uint64_t path_cap = kDefaultPathCap;
};

/**
 * The effective paths S* of a frozen diagram with p(s) and U(s).
 *
 * Paths are stored column-major: column(k) holds the state of the k-th node
 * of the topological order for every path. Path indices are the
 * lexicographic rank among the effective paths.
 */
class PathTable {
 public:
  std::size_t size() const noexcept { return probabilities_.size(); }
  bool empty() const noexcept { return probabilities_.empty(); }
  std::size_t width() const noexcept { return columns_.size(); }

  StateIndex state(std::size_t path, std::size_t position) const { return columns_[position][path]; }
  std::span<const StateIndex> column(std::size_t position) const { return columns_.at(position); }
  std::vector<StateIndex> path(std::size_t index) const;

  std::span<const double> probabilities() const noexcept { return probabilities_; }
  std::span<const double> utilities() const noexcept { return utilities_; }
  /// p(s)·U(s) per path.
  std::span<const double> weights() const noexcept { return weights_; }

  /// Information state index of the k-th decision node (decision_nodes()
  /// order) on every path.
  std::span<const std::uint32_t> decision_info(std::size_t slot) const { return decision_info_.at(slot); }

  /// |S| before filtering.
  std::uint64_t unfiltered_count() const noexcept { return unfiltered_; }
  /// True when some removed path had positive probability.
  bool removed_positive_mass() const noexcept { return removed_positive_mass_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  friend PathTable enumerate_paths(const InfluenceDiagram&, const EnumerationOptions&);

  std::vector<std::vector<StateIndex>> columns_;
  std::vector<double> probabilities_;
  std::vector<double> utilities_;
  std::vector<double> weights_;
  std::vector<std::vector<std::uint32_t>> decision_info_;
  std::uint64_t unfiltered_ = 0;
  bool removed_positive_mass_ = false;
  std::vector<std::string> warnings_;
};

PathTable enumerate_paths(const InfluenceDiagram& diagram, const EnumerationOptions& options = {});

/// Product of the chance node conditionals along `states` (topological order).
double path_probability(const InfluenceDiagram& diagram, std::span<const StateIndex> states);
/// Sum of the value node utilities along `states`, in value node declaration order.
double path_utility(const InfluenceDiagram& diagram, std::span<const StateIndex> states);

/// Indices of effective paths containing (s_I(j), s_j) for decision node j.
std::vector<std::size_t> locally_compatible_paths(const InfluenceDiagram& diagram, const PathTable& table,
                                                  NodeId decision, std::uint64_t info_state, StateIndex choice);

/// |S_{s_j|s_I(j)}| over the unfiltered path set.
std::uint64_t unfiltered_local_count(const InfluenceDiagram& diagram, NodeId decision);

/// Number of locally compatible paths that can be active under one strategy,
/// i.e. the unfiltered count divided by the state counts of the decision
/// nodes outside {j} and I(j).
std::uint64_t active_local_count(const InfluenceDiagram& diagram, NodeId decision);

/// Γ(s_j | s_I(j)) = min(|S*_{s_j|s_I(j)}|, active_local_count).
std::uint64_t gamma(const InfluenceDiagram& diagram, const PathTable& table, NodeId decision, StateIndex choice,
                    std::uint64_t info_state);

/// Γ for every (s_I(j), s_j) of one decision, indexed info_state * |S_j| + s_j.
std::vector<std::uint64_t> gamma_table(const InfluenceDiagram& diagram, const PathTable& table, NodeId decision);

}  // namespace limid
