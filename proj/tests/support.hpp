#pragma once

// Test-side oracles and generators. The oracles recompute everything from
// the raw node tables with plain loops and do not call into paths,
// strategy or solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "limid/diagram.hpp"
#include "limid/strategy.hpp"

namespace testing {

using limid::InfluenceDiagram;
using limid::Node;
using limid::NodeId;
using limid::NodeKind;
using limid::StateIndex;
using limid::Strategy;

inline Node chance(std::string name, std::vector<std::string> states, std::vector<std::string> info = {}) {
  return {std::move(name), NodeKind::Chance, std::move(states), std::move(info)};
}
inline Node decision(std::string name, std::vector<std::string> states, std::vector<std::string> info = {}) {
  return {std::move(name), NodeKind::Decision, std::move(states), std::move(info)};
}
inline Node value(std::string name, std::vector<std::string> info = {}) {
  return {std::move(name), NodeKind::Value, {}, std::move(info)};
}

// C (p = [0.4, 0.6]) -> D (I = {C}) -> V (I = {C, D}), U = identity match.
inline InfluenceDiagram four_strategy_example() {
  InfluenceDiagram d;
  d.add_node(chance("C", {"c0", "c1"}));
  d.add_node(decision("D", {"d0", "d1"}, {"C"}));
  d.add_node(value("V", {"C", "D"}));
  d.set_probabilities("C", {{0.4, 0.6}});
  d.set_utilities("V", {1.0, 0.0, 0.0, 1.0});
  d.freeze();
  return d;
}

struct OraclePath {
  std::vector<StateIndex> states;  // topological order
  double p = 1.0;
  double u = 0.0;
};

// Row-major index of the parents' states, computed from the node's declared
// information set.
inline std::uint64_t oracle_info_index(const InfluenceDiagram& d, NodeId id, const std::vector<StateIndex>& states) {
  std::uint64_t idx = 0;
  for (const auto& parent : d.node(id).info_set) {
    const NodeId pid = *d.find(parent);
    std::size_t pos = 0;
    while (d.order()[pos] != pid) ++pos;
    idx = idx * d.node(pid).states.size() + states[pos];
  }
  return idx;
}

// All paths of |S| in lexicographic order, unfiltered.
inline std::vector<OraclePath> oracle_paths(const InfluenceDiagram& d) {
  const auto order = d.order();
  std::vector<OraclePath> out;
  std::vector<StateIndex> s(order.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == order.size()) {
      OraclePath path{s, 1.0, 0.0};
      for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const NodeId id = order[pos];
        if (d.node(id).kind != NodeKind::Chance) continue;
        const std::size_t width = d.node(id).states.size();
        path.p *= d.probabilities(id)[oracle_info_index(d, id, s) * width + s[pos]];
      }
      for (const NodeId v : d.value_nodes()) path.u += d.utilities(v)[oracle_info_index(d, v, s)];
      out.push_back(std::move(path));
      return;
    }
    for (StateIndex x = 0; x < d.node(order[k]).states.size(); ++x) {
      s[k] = x;
      rec(k + 1);
    }
  };
  rec(0);
  return out;
}

inline bool oracle_compatible(const InfluenceDiagram& d, const Strategy& z, const std::vector<StateIndex>& states) {
  for (const auto& local : z.locals) {
    std::size_t pos = 0;
    while (d.order()[pos] != local.owner) ++pos;
    if (local.choices[oracle_info_index(d, local.owner, states)] != states[pos]) return false;
  }
  return true;
}

inline double oracle_eu(const InfluenceDiagram& d, const std::vector<OraclePath>& paths, const Strategy& z) {
  double eu = 0.0;
  for (const auto& p : paths) {
    if (oracle_compatible(d, z, p.states)) eu += p.p * p.u;
  }
  return eu;
}

// Visits every strategy in lexicographic order of the encoding (first
// decision, first information state most significant).
inline void for_each_strategy(const InfluenceDiagram& d, const std::function<void(const Strategy&)>& visit) {
  Strategy z = limid::uniform_strategy(d, 0);
  std::vector<std::pair<std::size_t, std::size_t>> digits;
  for (std::size_t k = 0; k < z.locals.size(); ++k) {
    for (std::size_t i = 0; i < z.locals[k].choices.size(); ++i) digits.emplace_back(k, i);
  }
  while (true) {
    visit(z);
    std::size_t pos = digits.size();
    while (pos > 0) {
      const auto [k, i] = digits[pos - 1];
      auto& c = z.locals[k].choices[i];
      if (c + 1 < d.node(z.locals[k].owner).states.size()) {
        ++c;
        break;
      }
      c = 0;
      --pos;
    }
    if (pos == 0) return;
  }
}

struct RandomDiagramSpec {
  std::uint64_t max_paths = 1024;
  std::uint64_t max_strategies = 4096;
  bool negative_utilities = true;
};

// Random acyclic diagram: 2..6 chance/decision nodes with 1..3 states and up
// to 2 parents each among earlier nodes, 1..2 value nodes, Dirichlet rows
// and uniform utilities. At least one decision node.
inline InfluenceDiagram random_diagram(std::uint64_t seed, const RandomDiagramSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int attempt = 0;; ++attempt) {
    const int n = uniform_int(2, 6);
    std::vector<Node> nodes;
    std::vector<std::uint64_t> sizes;
    std::uint64_t paths = 1;
    bool has_decision = false;
    for (int k = 0; k < n; ++k) {
      const bool is_decision = uniform_int(0, 2) == 0 || (k == n - 1 && !has_decision);
      has_decision |= is_decision;
      const int states = uniform_int(1, 3);
      std::vector<std::string> st;
      for (int s = 0; s < states; ++s) st.push_back("s" + std::to_string(s));
      std::vector<std::string> info;
      const int parents = k == 0 ? 0 : uniform_int(0, std::min(2, k));
      while (static_cast<int>(info.size()) < parents) {
        const std::string p = "N" + std::to_string(uniform_int(0, k - 1));
        if (std::find(info.begin(), info.end(), p) == info.end()) info.push_back(p);
      }
      nodes.push_back({"N" + std::to_string(k), is_decision ? NodeKind::Decision : NodeKind::Chance, st, info});
      sizes.push_back(states);
      paths *= states;
    }
    if (paths > spec.max_paths) continue;

    std::uint64_t strategies = 1;
    for (const auto& node : nodes) {
      if (node.kind != NodeKind::Decision) continue;
      std::uint64_t infos = 1;
      for (const auto& p : node.info_set) infos *= sizes[std::stoi(p.substr(1))];
      for (std::uint64_t i = 0; i < infos; ++i) strategies *= node.states.size();
    }
    if (strategies > spec.max_strategies) continue;

    const int values = uniform_int(1, 2);
    for (int v = 0; v < values; ++v) {
      std::vector<std::string> info;
      const int parents = uniform_int(1, std::min(2, n));
      while (static_cast<int>(info.size()) < parents) {
        const std::string p = "N" + std::to_string(uniform_int(0, n - 1));
        if (std::find(info.begin(), info.end(), p) == info.end()) info.push_back(p);
      }
      nodes.push_back({"V" + std::to_string(v), NodeKind::Value, {}, info});
    }

    InfluenceDiagram d;
    for (const auto& node : nodes) d.add_node(node);
    std::exponential_distribution<double> expo(1.0);
    std::uniform_real_distribution<double> util(spec.negative_utilities ? -1.0 : 0.0, 1.0);
    for (NodeId id = 0; id < d.node_count(); ++id) {
      const Node& node = d.node(id);
      if (node.kind == NodeKind::Chance) {
        std::vector<std::vector<double>> rows(d.info_state_count(id));
        for (auto& row : rows) {
          double total = 0.0;
          for (std::size_t s = 0; s < node.states.size(); ++s) total += row.emplace_back(expo(rng));
          for (auto& x : row) x /= total;
        }
        d.set_probabilities(node.name, rows);
      } else if (node.kind == NodeKind::Value) {
        std::vector<double> t(d.info_state_count(id));
        for (auto& x : t) x = util(rng);
        d.set_utilities(node.name, t);
      }
    }
    d.freeze();
    return d;
  }
}

}  // namespace testing
