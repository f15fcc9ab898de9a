#include "limid/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <thread>

#include "limid/error.hpp"
#include "limid/solvers.hpp"

namespace limid {
namespace {

class Sampler {
 public:
  explicit Sampler(const GeneratorOptions& options) : rng_(options.seed), negative_(options.negative_utilities) {}

  // Uniform on the simplex: normalized unit exponentials.
  std::vector<double> simplex(std::size_t k) {
    std::exponential_distribution<double> exp(1.0);
    std::vector<double> row(k);
    double total = 0.0;
    for (auto& x : row) total += (x = exp(rng_));
    for (auto& x : row) x /= total;
    return row;
  }

  std::vector<std::vector<double>> table(std::size_t rows, std::size_t k) {
    std::vector<std::vector<double>> out;
    out.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) out.push_back(simplex(k));
    return out;
  }

  std::vector<double> utilities(std::size_t n) {
    std::uniform_real_distribution<double> u(negative_ ? -1.0 : 0.0, 1.0);
    std::vector<double> out(n);
    for (auto& x : out) x = u(rng_);
    return out;
  }

 private:
  std::mt19937_64 rng_;
  bool negative_;
};

Node chance(std::string name, std::vector<std::string> states, std::vector<std::string> info) {
  return {std::move(name), NodeKind::Chance, std::move(states), std::move(info)};
}
Node decision(std::string name, std::vector<std::string> states, std::vector<std::string> info) {
  return {std::move(name), NodeKind::Decision, std::move(states), std::move(info)};
}
Node value(std::string name, std::vector<std::string> info) {
  return {std::move(name), NodeKind::Value, {}, std::move(info)};
}

std::string indexed(const char* prefix, int i) { return prefix + std::to_string(i); }

void check_probability(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::InvalidParams, std::string(what) + " outside [0,1]");
}

int nearest_level(double risk, int levels) {
  return static_cast<int>(std::lround(risk * (levels - 1)));
}

// Distribution of the next risk level given the current level, the test
// (nullptr for no test) and the true health state.
std::vector<double> risk_transition(int level, int levels, const ChdTest* test, bool chd) {
  std::vector<double> row(levels, 0.0);
  if (test == nullptr) {
    row[level] = 1.0;
    return row;
  }
  const double prior = risk_level(level, levels);
  const double p_positive = chd ? test->sensitivity : 1.0 - test->specificity;
  const auto assign = [&](TestResult result, double mass) {
    if (mass == 0.0) return;
    int next = level;
    try {
      next = nearest_level(bayes_update(prior, test->sensitivity, test->specificity, result), levels);
    } catch (const Error& e) {
      // The result is impossible at this prior; its mass (reachable only
      // on zero-probability rows) stays at the current level.
      if (e.code() != ErrorCode::DegenerateTest) throw;
    }
    row[next] += mass;
  };
  assign(TestResult::Positive, p_positive);
  assign(TestResult::Negative, 1.0 - p_positive);
  return row;
}

}  // namespace

InfluenceDiagram gen_pigfarm(int n, const GeneratorOptions& options) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "pig farm needs n >= 1");
  Sampler sampler(options);
  InfluenceDiagram d;
  const std::vector<std::string> health{"ill", "healthy"};
  d.add_node(chance("H1", health, {}));
  for (int t = 1; t <= n; ++t) {
    d.add_node(chance(indexed("T", t), {"positive", "negative"}, {indexed("H", t)}));
    d.add_node(decision(indexed("D", t), {"treat", "pass"}, {indexed("T", t)}));
    d.add_node(chance(indexed("H", t + 1), health, {indexed("H", t), indexed("D", t)}));
  }
  for (int t = 1; t <= n; ++t) d.add_node(value(indexed("C", t), {indexed("D", t)}));
  d.add_node(value("M", {indexed("H", n + 1)}));

  if (options.randomize) {
    d.set_probabilities("H1", sampler.table(1, 2));
    for (int t = 1; t <= n; ++t) {
      d.set_probabilities(indexed("T", t), sampler.table(2, 2));
      d.set_probabilities(indexed("H", t + 1), sampler.table(4, 2));
    }
    for (int t = 1; t <= n; ++t) d.set_utilities(indexed("C", t), sampler.utilities(2));
    d.set_utilities("M", sampler.utilities(2));
  } else {
    d.set_probabilities("H1", {{0.1, 0.9}});
    for (int t = 1; t <= n; ++t) {
      d.set_probabilities(indexed("T", t), {{0.8, 0.2}, {0.1, 0.9}});
      // rows: (ill, treat), (ill, pass), (healthy, treat), (healthy, pass)
      d.set_probabilities(indexed("H", t + 1), {{0.5, 0.5}, {0.9, 0.1}, {0.1, 0.9}, {0.2, 0.8}});
    }
    for (int t = 1; t <= n; ++t) d.set_utilities(indexed("C", t), {-100.0, 0.0});
    d.set_utilities("M", {300.0, 1000.0});
  }
  d.freeze();
  return d;
}

InfluenceDiagram gen_nmonitoring(int n, const GeneratorOptions& options) {
  if (n < 1) throw Error(ErrorCode::InvalidParams, "N-monitoring needs n >= 1");
  Sampler sampler(options);
  InfluenceDiagram d;
  d.add_node(chance("L", {"high", "low"}, {}));
  for (int i = 1; i <= n; ++i) d.add_node(chance(indexed("R", i), {"high", "low"}, {"L"}));
  for (int i = 1; i <= n; ++i) d.add_node(decision(indexed("A", i), {"fortify", "pass"}, {indexed("R", i)}));
  std::vector<std::string> f_info{"L"};
  std::vector<std::string> t_info{"F"};
  for (int i = 1; i <= n; ++i) {
    f_info.push_back(indexed("A", i));
    t_info.push_back(indexed("A", i));
  }
  d.add_node(chance("F", {"failure", "success"}, f_info));
  d.add_node(value("T", t_info));

  const std::size_t action_states = std::size_t{1} << n;
  if (options.randomize) {
    d.set_probabilities("L", sampler.table(1, 2));
    for (int i = 1; i <= n; ++i) d.set_probabilities(indexed("R", i), sampler.table(2, 2));
    d.set_probabilities("F", sampler.table(2 * action_states, 2));
    d.set_utilities("T", sampler.utilities(2 * action_states));
  } else {
    d.set_probabilities("L", {{0.4, 0.6}});
    for (int i = 1; i <= n; ++i) d.set_probabilities(indexed("R", i), {{0.8, 0.2}, {0.2, 0.8}});
    // Row-major over (first parent, A1..An): A1 has the largest stride after
    // the first parent, An the smallest; bit (n-i) of the index is A_i, and
    // state 0 means fortify.
    const auto fortified = [&](std::size_t actions) {
      int count = 0;
      for (int i = 0; i < n; ++i) count += ((actions >> i) & 1u) == 0 ? 1 : 0;
      return count;
    };
    std::vector<std::vector<double>> f_rows;
    for (const double base : {0.6, 0.2}) {
      for (std::size_t a = 0; a < action_states; ++a) {
        const double p = base * std::pow(0.5, fortified(a));
        f_rows.push_back({p, 1.0 - p});
      }
    }
    d.set_probabilities("F", f_rows);
    std::vector<double> t_table;
    for (const double outcome : {0.0, 100.0}) {
      for (std::size_t a = 0; a < action_states; ++a) t_table.push_back(outcome - 10.0 * fortified(a));
    }
    d.set_utilities("T", t_table);
  }
  d.freeze();
  return d;
}

double bayes_update(double prior, double sensitivity, double specificity, TestResult result) {
  check_probability(prior, "prior");
  check_probability(sensitivity, "sensitivity");
  check_probability(specificity, "specificity");
  if (prior == 0.0) return 0.0;
  const bool positive = result == TestResult::Positive;
  const double numerator = (positive ? sensitivity : 1.0 - sensitivity) * prior;
  const double other = (positive ? 1.0 - specificity : specificity) * (1.0 - prior);
  const double denominator = numerator + other;
  if (denominator == 0.0) {
    throw Error(ErrorCode::DegenerateTest, std::string(positive ? "positive" : "negative") +
                                               " result has probability 0 at this prior");
  }
  return numerator / denominator;
}

double risk_level(int level, int levels) { return static_cast<double>(level) / (levels - 1); }

ChdModel gen_chd(const ChdParams& params, std::optional<int> prior_level) {
  const int levels = params.risk_levels;
  if (levels < 2) throw Error(ErrorCode::InvalidParams, "risk_levels must be at least 2");
  for (const ChdTest* t : {&params.trs, &params.grs}) {
    check_probability(t->sensitivity, "sensitivity");
    check_probability(t->specificity, "specificity");
    if (!std::isfinite(t->cost)) throw Error(ErrorCode::InvalidParams, "test cost");
  }
  for (const auto& row : params.benefit) {
    for (const double b : row) {
      if (!std::isfinite(b)) throw Error(ErrorCode::InvalidParams, "benefit");
    }
  }
  if (prior_level && (*prior_level < 0 || *prior_level >= levels)) {
    throw Error(ErrorCode::InvalidParams, "prior level out of range");
  }
  std::vector<double> prior = params.prior;
  if (prior.empty()) prior.assign(levels, 1.0 / levels);
  if (prior.size() != static_cast<std::size_t>(levels)) throw Error(ErrorCode::InvalidParams, "prior size");
  if (prior_level) {
    prior.assign(levels, 0.0);
    prior[*prior_level] = 1.0;
  }

  std::vector<std::string> risk_states;
  for (int k = 0; k < levels; ++k) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g%%", 100.0 * risk_level(k, levels));
    risk_states.emplace_back(buf);
  }
  const std::vector<std::string> tests{"TRS", "GRS", "none"};

  ChdModel model;
  auto& d = model.diagram;
  d.add_node(chance("R0", risk_states, {}));
  d.add_node(chance("H", {"no_chd", "chd"}, {"R0"}));
  d.add_node(decision("T1", tests, {"R0"}));
  d.add_node(chance("R1", risk_states, {"R0", "T1", "H"}));
  d.add_node(decision("T2", tests, {"R1"}));
  d.add_node(chance("R2", risk_states, {"R1", "T2", "H"}));
  d.add_node(decision("TD", {"treat", "no_treat"}, {"R2"}));
  d.add_node(value("TC", {"T1", "T2"}));
  d.add_node(value("HB", {"H", "TD"}));

  d.set_probabilities("R0", {prior});
  std::vector<std::vector<double>> h_rows;
  for (int k = 0; k < levels; ++k) {
    const double a = risk_level(k, levels);
    h_rows.push_back({1.0 - a, a});
  }
  d.set_probabilities("H", h_rows);

  const ChdTest* by_state[3] = {&params.trs, &params.grs, nullptr};
  std::vector<std::vector<double>> r_rows;
  for (int k = 0; k < levels; ++k) {
    for (const ChdTest* test : by_state) {
      for (const bool chd : {false, true}) r_rows.push_back(risk_transition(k, levels, test, chd));
    }
  }
  d.set_probabilities("R1", r_rows);
  d.set_probabilities("R2", r_rows);

  const double cost[3] = {params.trs.cost, params.grs.cost, 0.0};
  std::vector<double> tc;
  for (const double c1 : cost) {
    for (const double c2 : cost) tc.push_back(-(c1 + c2));
  }
  d.set_utilities("TC", tc);
  d.set_utilities("HB", {params.benefit[0][0], params.benefit[0][1], params.benefit[1][0], params.benefit[1][1]});
  d.freeze();

  model.forbidden = {
      make_pattern(d, {{"T1", {"TRS"}}, {"T2", {"TRS"}}}),
      make_pattern(d, {{"T1", {"GRS"}}, {"T2", {"GRS"}}}),
      make_pattern(d, {{"T1", {"none"}}, {"T2", {"TRS"}}}),
      make_pattern(d, {{"T1", {"none"}}, {"T2", {"GRS"}}}),
  };
  if (prior_level) model.pins.push_back({d.id("R0"), static_cast<StateIndex>(*prior_level)});
  return model;
}

std::vector<PerPriorRow> solve_per_prior(const ChdParams& params, const PerPriorOptions& options) {
  const int levels = params.risk_levels;
  if (levels < 2) throw Error(ErrorCode::InvalidParams, "risk_levels must be at least 2");
  std::vector<PerPriorRow> rows(levels);
  const auto solve_level = [&](int k) {
    const ChdModel model = gen_chd(params, k);
    const PathTable table = enumerate_paths(model.diagram, model.enumeration());
    PerPriorRow& row = rows[k];
    row.level = k;
    row.risk = risk_level(k, levels);
    if (options.solver == PerPriorSolver::BruteForce) {
      auto r = brute_force(model.diagram, table);
      row.expected_utility = r.expected_utility;
      row.strategy = std::move(r.strategy);
    } else {
      auto r = spu_multistart(model.diagram, table, options.restarts, options.seed);
      row.expected_utility = r.best.expected_utility;
      row.strategy = std::move(r.best.strategy);
    }
    const auto& d = model.diagram;
    const NodeId t1 = d.id("T1");
    const NodeId td = d.id("TD");
    row.first_test = d.node(t1).states[row.strategy.locals[d.decision_slot(t1)].choices[k]];
    row.treatment = d.node(td).states[row.strategy.locals[d.decision_slot(td)].choices[k]];
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, static_cast<std::size_t>(levels));
  if (threads == 1) {
    for (int k = 0; k < levels; ++k) solve_level(k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        try {
          for (std::size_t k = t; k < static_cast<std::size_t>(levels); k += threads) solve_level(static_cast<int>(k));
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
  return rows;
}

std::string format_per_prior(const std::vector<PerPriorRow>& rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-6s %-10s %-10s %-10s %s\n", "level", "risk", "first", "treatment", "eu");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-6d %-10.4f %-10s %-10s %.10g\n", r.level, r.risk, r.first_test.c_str(),
                  r.treatment.c_str(), r.expected_utility);
    out += buf;
  }
  return out;
}

}  // namespace limid
