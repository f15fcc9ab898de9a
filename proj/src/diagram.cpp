#include "limid/diagram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>

#include "limid/error.hpp"

namespace limid {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Chance: return "chance";
    case NodeKind::Decision: return "decision";
    case NodeKind::Value: return "value";
  }
  return "unknown";
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) noexcept {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

void InfluenceDiagram::require_unfrozen() const {
  if (frozen_) throw Error(ErrorCode::Frozen, "diagram is frozen");
}

void InfluenceDiagram::check_node_shape(const Node& node) const {
  if (node.name.empty()) throw Error(ErrorCode::InvalidParams, "node name is empty");
  if (index_.contains(node.name)) throw Error(ErrorCode::DuplicateName, node.name);
  if (std::find(node.info_set.begin(), node.info_set.end(), node.name) != node.info_set.end()) {
    throw Error(ErrorCode::SelfReference, node.name + " is in its own information set");
  }
  std::set<std::string_view> seen;
  for (const auto& p : node.info_set) {
    if (!seen.insert(p).second) {
      throw Error(ErrorCode::DuplicateName, "parent " + p + " listed twice for " + node.name);
    }
  }
  if (node.kind == NodeKind::Value) {
    if (!node.states.empty()) {
      throw Error(ErrorCode::InvalidParams, "value node " + node.name + " cannot have states");
    }
  } else {
    if (node.states.empty()) throw Error(ErrorCode::EmptyStateSpace, node.name);
    std::set<std::string_view> names;
    for (const auto& s : node.states) {
      if (!names.insert(s).second) {
        throw Error(ErrorCode::DuplicateName, "state " + s + " of " + node.name);
      }
    }
  }
}

void InfluenceDiagram::append(Node node) {
  const NodeId id = nodes_.size();
  index_.emplace(node.name, id);
  nodes_.push_back(std::move(node));
  parents_.emplace_back();
  strides_.emplace_back();
  info_counts_.push_back(1);
  probabilities_.emplace_back();
  utilities_.emplace_back();
  has_tensor_.push_back(false);
}

// Resolves parent names and the information state layout of one node.
void InfluenceDiagram::link(NodeId id) {
  const Node& node = nodes_[id];
  std::vector<NodeId> parents;
  parents.reserve(node.info_set.size());
  for (const auto& p : node.info_set) {
    auto it = index_.find(p);
    if (it == index_.end()) {
      throw Error(ErrorCode::UnknownParent, p + " (information set of " + node.name + ")");
    }
    if (nodes_[it->second].kind == NodeKind::Value) {
      throw Error(ErrorCode::ValueParent, p + " is a value node in the information set of " + node.name);
    }
    parents.push_back(it->second);
  }
  std::vector<std::uint64_t> strides(parents.size(), 1);
  std::uint64_t count = 1;
  for (std::size_t k = parents.size(); k-- > 0;) {
    strides[k] = count;
    count = saturating_mul(count, nodes_[parents[k]].states.size());
  }
  parents_[id] = std::move(parents);
  strides_[id] = std::move(strides);
  info_counts_[id] = count;
}

NodeId InfluenceDiagram::add_node(Node node) {
  require_unfrozen();
  check_node_shape(node);
  for (const auto& p : node.info_set) {
    auto it = index_.find(p);
    if (it == index_.end()) {
      throw Error(ErrorCode::UnknownParent, p + " (information set of " + node.name + ")");
    }
    if (nodes_[it->second].kind == NodeKind::Value) {
      throw Error(ErrorCode::ValueParent, p + " is a value node in the information set of " + node.name);
    }
  }
  append(std::move(node));
  const NodeId id = nodes_.size() - 1;
  link(id);
  return id;
}

void InfluenceDiagram::add_nodes(std::span<const Node> batch) {
  require_unfrozen();
  std::unordered_map<std::string_view, std::size_t> local;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    check_node_shape(batch[k]);
    if (!local.emplace(batch[k].name, k).second) {
      throw Error(ErrorCode::DuplicateName, batch[k].name);
    }
  }
  // Kahn over the batch; arcs from already declared nodes are satisfied.
  std::vector<std::size_t> indegree(batch.size(), 0);
  std::vector<std::vector<std::size_t>> children(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    for (const auto& p : batch[k].info_set) {
      if (auto it = local.find(p); it != local.end()) {
        if (batch[it->second].kind == NodeKind::Value) {
          throw Error(ErrorCode::ValueParent, p + " is a value node in the information set of " + batch[k].name);
        }
        ++indegree[k];
        children[it->second].push_back(k);
      } else if (!index_.contains(p)) {
        throw Error(ErrorCode::UnknownParent, p + " (information set of " + batch[k].name + ")");
      }
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t k = 0; k < batch.size(); ++k) {
    if (indegree[k] == 0) ready.push_back(k);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t k = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t c : children[k]) {
      if (--indegree[c] == 0) ready.push_back(c);
    }
  }
  if (visited != batch.size()) {
    std::string members;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      if (indegree[k] > 0) members += (members.empty() ? "" : ",") + batch[k].name;
    }
    throw Error(ErrorCode::CycleDetected, "among {" + members + "}");
  }
  const NodeId first = nodes_.size();
  for (const auto& node : batch) append(node);
  for (NodeId id = first; id < nodes_.size(); ++id) link(id);
}

std::optional<NodeId> InfluenceDiagram::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeId InfluenceDiagram::id(std::string_view name) const {
  auto found = find(name);
  if (!found) throw Error(ErrorCode::UnknownParent, std::string(name) + " is not declared");
  return *found;
}

std::optional<StateIndex> InfluenceDiagram::find_state(NodeId id, std::string_view state) const {
  const auto& states = nodes_.at(id).states;
  auto it = std::find(states.begin(), states.end(), state);
  if (it == states.end()) return std::nullopt;
  return static_cast<StateIndex>(it - states.begin());
}

std::uint64_t InfluenceDiagram::info_state_index(NodeId id, std::span<const StateIndex> parent_states) const {
  const auto& strides = strides_.at(id);
  if (parent_states.size() != strides.size()) {
    throw Error(ErrorCode::DimensionMismatch, "information state arity for " + nodes_[id].name);
  }
  std::uint64_t index = 0;
  for (std::size_t k = 0; k < strides.size(); ++k) index += parent_states[k] * strides[k];
  return index;
}

std::vector<StateIndex> InfluenceDiagram::decode_info_state(NodeId id, std::uint64_t index) const {
  const auto& parents = parents_.at(id);
  std::vector<StateIndex> states(parents.size());
  for (std::size_t k = parents.size(); k-- > 0;) {
    const auto n = nodes_[parents[k]].states.size();
    states[k] = static_cast<StateIndex>(index % n);
    index /= n;
  }
  return states;
}

std::string InfluenceDiagram::info_state_label(NodeId id, std::uint64_t index, std::string_view sep) const {
  const auto states = decode_info_state(id, index);
  const auto& parents = parents_.at(id);
  std::string label;
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k > 0) label += sep;
    label += nodes_[parents[k]].states[states[k]];
  }
  return label;
}

void InfluenceDiagram::check_probability_rows(NodeId id, const std::vector<std::vector<double>>& rows) const {
  const Node& node = nodes_[id];
  if (node.kind != NodeKind::Chance) {
    throw Error(ErrorCode::WrongKind, node.name + " is not a chance node");
  }
  if (rows.size() != info_counts_[id]) {
    throw Error(ErrorCode::DimensionMismatch, node.name + ": expected " + std::to_string(info_counts_[id]) +
                                                  " rows, got " + std::to_string(rows.size()));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto where = [&] { return " at " + node.name + ",(" + info_state_label(id, r) + ")"; };
    if (rows[r].size() != node.states.size()) {
      throw Error(ErrorCode::DimensionMismatch, "expected " + std::to_string(node.states.size()) +
                                                    " columns, got " + std::to_string(rows[r].size()) + where());
    }
    double sum = 0.0;
    for (double p : rows[r]) {
      if (p < 0.0) throw Error(ErrorCode::NegativeProbability, std::to_string(p) + where());
      sum += p;
    }
    if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
      throw Error(ErrorCode::NotNormalized, where().substr(1));
    }
  }
}

void InfluenceDiagram::set_probabilities(std::string_view owner, const std::vector<std::vector<double>>& rows) {
  require_unfrozen();
  const NodeId id = this->id(owner);
  check_probability_rows(id, rows);
  std::vector<double> flat;
  flat.reserve(rows.size() * nodes_[id].states.size());
  for (const auto& row : rows) flat.insert(flat.end(), row.begin(), row.end());
  probabilities_[id] = std::move(flat);
  has_tensor_[id] = true;
}

void InfluenceDiagram::set_utilities(std::string_view owner, std::vector<double> table) {
  require_unfrozen();
  const NodeId id = this->id(owner);
  const Node& node = nodes_[id];
  if (node.kind != NodeKind::Value) throw Error(ErrorCode::WrongKind, node.name + " is not a value node");
  if (table.size() < info_counts_[id]) {
    throw Error(ErrorCode::IncompleteUtilities, node.name + ": " + std::to_string(table.size()) + " of " +
                                                    std::to_string(info_counts_[id]) + " information states");
  }
  if (table.size() > info_counts_[id]) {
    throw Error(ErrorCode::DimensionMismatch, node.name + ": expected " + std::to_string(info_counts_[id]) +
                                                  " utilities, got " + std::to_string(table.size()));
  }
  for (double u : table) {
    if (!std::isfinite(u)) throw Error(ErrorCode::InvalidParams, "non-finite utility for " + node.name);
  }
  utilities_[id] = std::move(table);
  has_tensor_[id] = true;
}

const std::vector<std::string>& InfluenceDiagram::freeze() {
  if (frozen_) return warnings_;

  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].kind != NodeKind::Decision && !has_tensor_[id]) {
      throw Error(ErrorCode::MissingTensor, nodes_[id].name);
    }
  }

  // Kahn's algorithm over C and D, ties broken by insertion order.
  std::vector<std::size_t> indegree(nodes_.size(), 0);
  std::vector<std::vector<NodeId>> children(nodes_.size());
  std::size_t path_nodes = 0;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    for (NodeId p : parents_[id]) children[p].push_back(id);
    if (nodes_[id].kind == NodeKind::Value) continue;
    ++path_nodes;
    indegree[id] = parents_[id].size();
  }
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].kind != NodeKind::Value && indegree[id] == 0) ready.push(id);
  }
  std::vector<NodeId> order;
  order.reserve(path_nodes);
  while (!ready.empty()) {
    const NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (NodeId c : children[id]) {
      if (nodes_[c].kind != NodeKind::Value && --indegree[c] == 0) ready.push(c);
    }
  }
  if (order.size() != path_nodes) throw Error(ErrorCode::CycleDetected, "directed cycle in the arc set");

  // A node is redundant when no directed path leads from it to a value node.
  std::vector<bool> useful(nodes_.size(), false);
  std::vector<NodeId> stack;
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].kind == NodeKind::Value) stack.push_back(id);
  }
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    for (NodeId p : parents_[id]) {
      if (!useful[p]) {
        useful[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<std::string> warnings;
  for (NodeId id : order) {
    if (!useful[id]) {
      warnings.push_back("RedundantNodeWarning: " + nodes_[id].name + " has no directed path to a value node");
    }
  }

  order_ = std::move(order);
  position_.assign(nodes_.size(), std::numeric_limits<std::size_t>::max());
  chance_.clear();
  decisions_.clear();
  values_.clear();
  path_count_ = 1;
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const NodeId id = order_[k];
    position_[id] = k;
    (nodes_[id].kind == NodeKind::Chance ? chance_ : decisions_).push_back(id);
    path_count_ = saturating_mul(path_count_, nodes_[id].states.size());
  }
  for (NodeId id = 0; id < nodes_.size(); ++id) {
    if (nodes_[id].kind == NodeKind::Value) values_.push_back(id);
  }
  slot_.assign(nodes_.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t k = 0; k < decisions_.size(); ++k) slot_[decisions_[k]] = k;
  warnings_ = std::move(warnings);
  frozen_ = true;
  return warnings_;
}

InfluenceDiagram InfluenceDiagram::with_utilities(NodeId owner, std::vector<double> table) const {
  InfluenceDiagram copy = *this;
  const bool was_frozen = copy.frozen_;
  copy.frozen_ = false;
  copy.set_utilities(nodes_.at(owner).name, std::move(table));
  copy.frozen_ = was_frozen;
  return copy;
}

InfluenceDiagram InfluenceDiagram::with_probabilities(NodeId owner, const std::vector<std::vector<double>>& rows) const {
  InfluenceDiagram copy = *this;
  const bool was_frozen = copy.frozen_;
  copy.frozen_ = false;
  copy.set_probabilities(nodes_.at(owner).name, rows);
  copy.frozen_ = was_frozen;
  return copy;
}

std::span<const NodeId> InfluenceDiagram::order() const {
  if (!frozen_) throw Error(ErrorCode::NotFrozen, "topological order requested before freeze");
  return order_;
}

std::size_t InfluenceDiagram::position(NodeId id) const {
  if (!frozen_) throw Error(ErrorCode::NotFrozen, "position requested before freeze");
  const auto pos = position_.at(id);
  if (pos == std::numeric_limits<std::size_t>::max()) {
    throw Error(ErrorCode::WrongKind, nodes_[id].name + " is a value node and has no path position");
  }
  return pos;
}

std::size_t InfluenceDiagram::decision_slot(NodeId id) const {
  if (!frozen_) throw Error(ErrorCode::NotFrozen, "decision slot requested before freeze");
  const auto slot = slot_.at(id);
  if (slot == std::numeric_limits<std::size_t>::max()) {
    throw Error(ErrorCode::WrongKind, nodes_[id].name + " is not a decision node");
  }
  return slot;
}

std::uint64_t InfluenceDiagram::path_count() const {
  if (!frozen_) throw Error(ErrorCode::NotFrozen, "path count requested before freeze");
  return path_count_;
}

}  // namespace limid
