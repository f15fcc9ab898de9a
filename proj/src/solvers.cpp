#include "limid/solvers.hpp"

#include <algorithm>
#include <exception>
#include <thread>

#include "limid/error.hpp"
#include "limid/kernels.hpp"

namespace limid {
namespace {

struct Pair {
  std::size_t slot;
  std::uint64_t info;
  std::size_t states;
};

// Paths grouped by (decision slot, information state, alternative); each
// group lists path indices in ascending order.
struct Groups {
  std::vector<std::vector<std::vector<std::uint32_t>>> lists;  // [slot][info * |S_j| + s_j]
  std::vector<std::size_t> states;

  const std::vector<std::uint32_t>& at(std::size_t slot, std::uint64_t info, StateIndex choice) const {
    return lists[slot][info * states[slot] + choice];
  }
};

Groups group_paths(const InfluenceDiagram& diagram, const PathTable& table) {
  const auto decisions = diagram.decision_nodes();
  Groups g;
  g.lists.resize(decisions.size());
  g.states.resize(decisions.size());
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    g.states[d] = diagram.state_count(j);
    g.lists[d].resize(diagram.info_state_count(j) * g.states[d]);
    const auto info = table.decision_info(d);
    const auto col = table.column(diagram.position(j));
    for (std::size_t i = 0; i < table.size(); ++i) {
      g.lists[d][info[i] * g.states[d] + col[i]].push_back(static_cast<std::uint32_t>(i));
    }
  }
  return g;
}

bool pair_is_relevant(const Groups& g, std::size_t slot, std::uint64_t info) {
  for (std::size_t c = 0; c < g.states[slot]; ++c) {
    if (!g.lists[slot][info * g.states[slot] + c].empty()) return true;
  }
  return false;
}

class BruteForce {
 public:
  // `pairs` are enumerated; `last_slot` (if any) is optimized per
  // information state at every leaf, over `last_infos`.
  BruteForce(const InfluenceDiagram& diagram, const PathTable& table, std::vector<Pair> pairs,
             std::optional<std::size_t> last_slot, std::vector<std::uint64_t> last_infos)
      : table_(table),
        pairs_(std::move(pairs)),
        last_slot_(last_slot),
        last_infos_(std::move(last_infos)),
        levels_(pairs_.size() + 1),
        current_(diagram.decision_nodes().size()) {
    for (std::size_t d = 0; d < current_.size(); ++d) {
      const NodeId j = diagram.decision_nodes()[d];
      current_[d].assign(diagram.info_state_count(j), 0);
      info_.push_back(table.decision_info(d));
      column_.push_back(table.column(diagram.position(j)));
    }
    if (last_slot_) {
      last_states_ = diagram.state_count(diagram.decision_nodes()[*last_slot_]);
      group_.resize(current_[*last_slot_].size() * last_states_);
    }
    best_choices_ = current_;
    levels_[0].resize(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) levels_[0][i] = static_cast<std::uint32_t>(i);
  }

  void run() { descend(0); }

  std::uint64_t examined() const { return examined_; }
  const std::vector<std::vector<StateIndex>>& best_choices() const { return best_choices_; }

 private:
  void descend(std::size_t level) {
    if (level == pairs_.size()) {
      leaf(levels_[level]);
      return;
    }
    const Pair& pr = pairs_[level];
    const auto& alive = levels_[level];
    auto& next = levels_[level + 1];
    const auto info = info_[pr.slot];
    const auto col = column_[pr.slot];
    for (std::size_t c = 0; c < pr.states; ++c) {
      current_[pr.slot][pr.info] = static_cast<StateIndex>(c);
      next.clear();
      for (const std::uint32_t i : alive) {
        if (info[i] != pr.info || col[i] == c) next.push_back(i);
      }
      descend(level + 1);
    }
    current_[pr.slot][pr.info] = 0;
  }

  void leaf(const std::vector<std::uint32_t>& alive) {
    const auto p = table_.probabilities();
    const auto w = table_.weights();
    Score s;
    if (!last_slot_) {
      for (const std::uint32_t i : alive) {
        s.mass += p[i];
        s.expected_utility += w[i];
      }
    } else {
      // Every alive path lies in exactly one information state of the last
      // decision, so its choices can be optimized one state at a time.
      const std::size_t k = last_states_;
      for (const std::uint64_t info : last_infos_) {
        for (std::size_t c = 0; c < k; ++c) group_[info * k + c] = Score{};
      }
      const auto info = info_[*last_slot_];
      const auto col = column_[*last_slot_];
      for (const std::uint32_t i : alive) {
        Score& g = group_[info[i] * k + col[i]];
        g.mass += p[i];
        g.expected_utility += w[i];
      }
      auto& choices = current_[*last_slot_];
      for (const std::uint64_t info_state : last_infos_) {
        StateIndex pick = 0;
        for (std::size_t c = 1; c < k; ++c) {
          if (better(group_[info_state * k + c], group_[info_state * k + pick])) pick = static_cast<StateIndex>(c);
        }
        choices[info_state] = pick;
        s.mass += group_[info_state * k + pick].mass;
        s.expected_utility += group_[info_state * k + pick].expected_utility;
      }
    }
    if (examined_ == 0 || better(s, best_)) {
      best_ = s;
      best_choices_ = current_;
    }
    ++examined_;
  }

  const PathTable& table_;
  std::vector<Pair> pairs_;
  std::optional<std::size_t> last_slot_;
  std::vector<std::uint64_t> last_infos_;
  std::size_t last_states_ = 0;
  std::vector<Score> group_;
  std::vector<std::vector<std::uint32_t>> levels_;
  std::vector<std::vector<StateIndex>> current_;
  std::vector<std::span<const std::uint32_t>> info_;
  std::vector<std::span<const StateIndex>> column_;
  std::vector<std::vector<StateIndex>> best_choices_;
  Score best_;
  std::uint64_t examined_ = 0;
};

Strategy make_strategy(const InfluenceDiagram& diagram, const std::vector<std::vector<StateIndex>>& choices) {
  Strategy z;
  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) z.locals.push_back({decisions[d], choices[d]});
  return z;
}

// Incremental evaluation state of one strategy: per path, the number of
// decisions whose chosen alternative differs from the path's state.
class Evaluator {
 public:
  Evaluator(const InfluenceDiagram& diagram, const PathTable& table, const Groups& groups, const Strategy& strategy)
      : diagram_(diagram), table_(table), groups_(groups), strategy_(strategy), mismatch_(table.size(), 0) {
    validate_strategy(diagram, strategy);
    const auto decisions = diagram.decision_nodes();
    for (std::size_t d = 0; d < decisions.size(); ++d) {
      const auto info = table.decision_info(d);
      const auto col = table.column(diagram.position(decisions[d]));
      const auto& choices = strategy.locals[d].choices;
      for (std::size_t i = 0; i < table.size(); ++i) {
        if (choices[info[i]] != col[i]) ++mismatch_[i];
      }
    }
    score_.expected_utility = expected_utility(diagram, table, strategy);
    score_.mass = compatible_mass(diagram, table, strategy);
  }

  const Score& score() const { return score_; }
  const Strategy& strategy() const { return strategy_; }

  // Score of the strategy with (slot, info) reassigned to `choice`.
  Score candidate(std::size_t slot, std::uint64_t info, StateIndex choice) const {
    const StateIndex cur = strategy_.locals[slot].choices[info];
    if (choice == cur) return score_;
    const kernels::Sums now = group_sums(slot, info, cur, 0);
    const kernels::Sums alt = group_sums(slot, info, choice, 1);
    return {score_.mass - now.first + alt.first, score_.expected_utility - now.second + alt.second};
  }

  // Best alternative at (slot, info): the current one unless another is
  // strictly better, ties resolved towards the lower index.
  std::pair<StateIndex, Score> best_alternative(std::size_t slot, std::uint64_t info) const {
    const StateIndex cur = strategy_.locals[slot].choices[info];
    const kernels::Sums now = group_sums(slot, info, cur, 0);
    StateIndex best_choice = cur;
    Score best = score_;
    for (StateIndex c = 0; c < groups_.states[slot]; ++c) {
      if (c == cur) continue;
      const kernels::Sums alt = group_sums(slot, info, c, 1);
      const Score s{score_.mass - now.first + alt.first, score_.expected_utility - now.second + alt.second};
      if (better(s, best)) {
        best = s;
        best_choice = c;
      }
    }
    return {best_choice, best};
  }

  void apply(std::size_t slot, std::uint64_t info, StateIndex choice, const Score& score) {
    auto& current = strategy_.locals[slot].choices[info];
    for (const std::uint32_t i : groups_.at(slot, info, current)) ++mismatch_[i];
    for (const std::uint32_t i : groups_.at(slot, info, choice)) --mismatch_[i];
    current = choice;
    score_ = score;
  }

  void refresh() {
    score_.expected_utility = expected_utility(diagram_, table_, strategy_);
    score_.mass = compatible_mass(diagram_, table_, strategy_);
  }

 private:
  kernels::Sums group_sums(std::size_t slot, std::uint64_t info, StateIndex choice, std::int32_t target) const {
    return kernels::masked_gather_sum(table_.probabilities(), table_.weights(), groups_.at(slot, info, choice),
                                      mismatch_, target);
  }

  const InfluenceDiagram& diagram_;
  const PathTable& table_;
  const Groups& groups_;
  Strategy strategy_;
  std::vector<std::int32_t> mismatch_;
  Score score_;
};

SpuResult run_spu(const InfluenceDiagram& diagram, const PathTable& table, const Groups& groups,
                  const Strategy& initial, const SpuOptions& options) {
  Evaluator ev(diagram, table, groups, initial);
  const auto decisions = diagram.decision_nodes();
  SpuResult result;
  bool changed = true;
  while (changed) {
    if (result.sweeps == options.max_sweeps) {
      result.converged = false;
      break;
    }
    changed = false;
    ++result.sweeps;
    for (std::size_t d = 0; d < decisions.size(); ++d) {
      const std::uint64_t infos = diagram.info_state_count(decisions[d]);
      for (std::uint64_t info = 0; info < infos; ++info) {
        const auto [choice, score] = ev.best_alternative(d, info);
        const StateIndex from = ev.strategy().locals[d].choices[info];
        if (choice == from) continue;
        Move m;
        m.decision = decisions[d];
        m.info_state = info;
        m.from = from;
        m.to = choice;
        m.old_eu = ev.score().expected_utility;
        m.old_mass = ev.score().mass;
        ev.apply(d, info, choice, score);
        m.new_eu = score.expected_utility;
        m.new_mass = score.mass;
        result.trace.push_back(m);
        changed = true;
      }
    }
  }
  ev.refresh();
  result.strategy = ev.strategy();
  result.expected_utility = ev.score().expected_utility;
  result.mass = ev.score().mass;
  return result;
}

}  // namespace

bool better(const Score& candidate, const Score& incumbent) {
  if (candidate.mass > incumbent.mass + kImprovementTolerance) return true;
  if (candidate.mass < incumbent.mass - kImprovementTolerance) return false;
  return candidate.expected_utility > incumbent.expected_utility + kImprovementTolerance;
}

BruteForceResult brute_force(const InfluenceDiagram& diagram, const PathTable& table, std::uint64_t cap) {
  if (table.empty()) throw Error(ErrorCode::EmptyPathTable, "no effective paths");
  const Groups groups = group_paths(diagram, table);
  const auto decisions = diagram.decision_nodes();

  std::vector<std::vector<std::uint64_t>> relevant(decisions.size());
  std::optional<std::size_t> last_slot;
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const std::uint64_t infos = diagram.info_state_count(decisions[d]);
    for (std::uint64_t info = 0; info < infos; ++info) {
      if (pair_is_relevant(groups, d, info)) relevant[d].push_back(info);
    }
    if (!relevant[d].empty()) last_slot = d;
  }

  std::vector<Pair> pairs;
  std::uint64_t enumerated = 1;
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    if (last_slot && d == *last_slot) continue;
    for (const std::uint64_t info : relevant[d]) {
      pairs.push_back({d, info, groups.states[d]});
      enumerated = saturating_mul(enumerated, groups.states[d]);
    }
  }
  if (enumerated > cap) {
    throw Error(ErrorCode::StrategySpaceTooLarge,
                std::to_string(enumerated) + " strategies exceed the cap of " + std::to_string(cap));
  }

  BruteForce search(diagram, table, std::move(pairs), last_slot,
                    last_slot ? relevant[*last_slot] : std::vector<std::uint64_t>{});
  search.run();

  BruteForceResult result;
  result.strategy = make_strategy(diagram, search.best_choices());
  result.expected_utility = expected_utility(diagram, table, result.strategy);
  result.mass = compatible_mass(diagram, table, result.strategy);
  result.examined = search.examined();
  result.strategy_space = strategy_space_size(diagram);
  return result;
}

SpuResult spu(const InfluenceDiagram& diagram, const PathTable& table, const Strategy& initial,
              const SpuOptions& options) {
  if (table.empty()) throw Error(ErrorCode::EmptyPathTable, "no effective paths");
  const Groups groups = group_paths(diagram, table);
  return run_spu(diagram, table, groups, initial, options);
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  return seed + static_cast<std::uint64_t>(restart) * 0x9E3779B97F4A7C15ull;
}

MultiStartResult spu_multistart(const InfluenceDiagram& diagram, const PathTable& table, std::size_t restarts,
                                std::uint64_t seed, std::size_t threads, const SpuOptions& options) {
  if (restarts == 0) throw Error(ErrorCode::InvalidParams, "restarts must be positive");
  if (table.empty()) throw Error(ErrorCode::EmptyPathTable, "no effective paths");
  const Groups groups = group_paths(diagram, table);

  std::vector<SpuResult> runs(restarts);
  std::vector<double> initial_eu(restarts);
  const auto work = [&](std::size_t r) {
    const Strategy start = random_strategy(diagram, restart_seed(seed, r));
    initial_eu[r] = expected_utility(diagram, table, start);
    runs[r] = run_spu(diagram, table, groups, start, options);
  };

  threads = std::clamp<std::size_t>(threads, 1, restarts);
  if (threads == 1) {
    for (std::size_t r = 0; r < restarts; ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t r = t; r < restarts; r += threads) work(r);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  MultiStartResult result;
  for (std::size_t r = 0; r < restarts; ++r) {
    result.restarts.push_back({restart_seed(seed, r), initial_eu[r], runs[r].expected_utility, runs[r].trace.size()});
    if (r == 0 || better({runs[r].mass, runs[r].expected_utility},
                         {runs[result.best_restart].mass, runs[result.best_restart].expected_utility})) {
      result.best_restart = r;
    }
  }
  result.best = std::move(runs[result.best_restart]);
  return result;
}

OptimalityCheck local_optimality_check(const InfluenceDiagram& diagram, const PathTable& table,
                                       const Strategy& strategy) {
  if (table.empty()) throw Error(ErrorCode::EmptyPathTable, "no effective paths");
  const Groups groups = group_paths(diagram, table);
  const Evaluator ev(diagram, table, groups, strategy);
  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const std::uint64_t infos = diagram.info_state_count(decisions[d]);
    for (std::uint64_t info = 0; info < infos; ++info) {
      const StateIndex cur = strategy.locals[d].choices[info];
      for (StateIndex c = 0; c < groups.states[d]; ++c) {
        if (c == cur) continue;
        const Score s = ev.candidate(d, info, c);
        if (!better(s, ev.score())) continue;
        OptimalityCheck out;
        out.locally_optimal = false;
        out.improving = Move{decisions[d], info, cur, c, ev.score().expected_utility, s.expected_utility,
                             ev.score().mass, s.mass};
        return out;
      }
    }
  }
  return {};
}

}  // namespace limid
