#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace limid {

using NodeId = std::size_t;
using StateIndex = std::uint32_t;

enum class NodeKind { Chance, Decision, Value };

std::string_view to_string(NodeKind kind);

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Chance;
  std::vector<std::string> states;    // empty iff Value
  std::vector<std::string> info_set;  // I(j), in the order that fixes tensor layout
};

/// Absolute tolerance on the row sums of conditional probability tables.
inline constexpr double kProbabilityTolerance = 1e-9;

/**
 * Influence diagram over chance, decision and value nodes.
 *
 * Nodes are added parents-first (or as a batch whose members may reference
 * each other), then tensors are attached, then freeze() fixes a topological
 * order over the chance and decision nodes. A frozen diagram is immutable.
 *
 * Tensor layout: an information state of node j is indexed row-major over
 * I(j) in its declared order, 0-based. Probability tables are stored as
 * info_state_count(j) rows of state_count(j) entries.
 */
class InfluenceDiagram {
 public:
  NodeId add_node(Node node);

  /// Adds several nodes at once. Information sets may reference nodes that
  /// appear later in the batch; a directed cycle inside the batch raises
  /// CycleDetected. Nodes keep the batch order for tie-breaking.
  void add_nodes(std::span<const Node> nodes);

  void set_probabilities(std::string_view owner, const std::vector<std::vector<double>>& rows);
  void set_utilities(std::string_view owner, std::vector<double> table);

  /// Computes the topological order and validates completeness. Returns the
  /// redundancy warnings. Calling it again on a frozen diagram is a no-op.
  const std::vector<std::string>& freeze();

  /// Frozen copy with the utility table of `owner` replaced.
  InfluenceDiagram with_utilities(NodeId owner, std::vector<double> table) const;
  /// Frozen copy with the probability table of chance node `owner` replaced.
  InfluenceDiagram with_probabilities(NodeId owner, const std::vector<std::vector<double>>& rows) const;

  bool frozen() const noexcept { return frozen_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::optional<NodeId> find(std::string_view name) const;
  /// Like find() but raises UnknownParent when the name is not declared.
  NodeId id(std::string_view name) const;
  std::optional<StateIndex> find_state(NodeId id, std::string_view state) const;

  std::span<const NodeId> parents(NodeId id) const { return parents_.at(id); }
  std::size_t state_count(NodeId id) const { return nodes_.at(id).states.size(); }
  std::uint64_t info_state_count(NodeId id) const { return info_counts_.at(id); }
  std::uint64_t info_state_index(NodeId id, std::span<const StateIndex> parent_states) const;
  std::vector<StateIndex> decode_info_state(NodeId id, std::uint64_t index) const;
  /// Parent state names joined by `sep`; empty for root nodes.
  std::string info_state_label(NodeId id, std::uint64_t index, std::string_view sep = ",") const;
  /// Row-major strides of the information state index over parents(id).
  std::span<const std::uint64_t> info_strides(NodeId id) const { return strides_.at(id); }

  // Available after freeze().
  std::span<const NodeId> order() const;
  std::size_t position(NodeId id) const;
  std::span<const NodeId> chance_nodes() const { return chance_; }
  std::span<const NodeId> decision_nodes() const { return decisions_; }
  std::span<const NodeId> value_nodes() const { return values_; }
  /// Index of a decision node within decision_nodes().
  std::size_t decision_slot(NodeId id) const;
  /// |S|, the product of all chance/decision state counts (saturates at UINT64_MAX).
  std::uint64_t path_count() const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::span<const double> probabilities(NodeId id) const { return probabilities_.at(id); }
  std::span<const double> utilities(NodeId id) const { return utilities_.at(id); }
  bool has_tensor(NodeId id) const { return has_tensor_.at(id); }

 private:
  void require_unfrozen() const;
  void check_node_shape(const Node& node) const;
  void append(Node node);
  void link(NodeId id);
  void check_probability_rows(NodeId id, const std::vector<std::vector<double>>& rows) const;

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeId> index_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<std::uint64_t>> strides_;
  std::vector<std::uint64_t> info_counts_;
  std::vector<std::vector<double>> probabilities_;
  std::vector<std::vector<double>> utilities_;
  std::vector<bool> has_tensor_;

  bool frozen_ = false;
  std::vector<NodeId> order_;
  std::vector<std::size_t> position_;
  std::vector<NodeId> chance_;
  std::vector<NodeId> decisions_;
  std::vector<NodeId> values_;
  std::vector<std::size_t> slot_;
  std::uint64_t path_count_ = 0;
  std::vector<std::string> warnings_;
};

/// Saturating product used for all path and strategy space sizes.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace limid
