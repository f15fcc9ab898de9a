#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "limid/diagram.hpp"
#include "limid/paths.hpp"
#include "limid/strategy.hpp"

namespace limid {

struct GeneratorOptions {
  std::uint64_t seed = 0;
  /// Draw every conditional distribution uniformly from the simplex and
  /// every utility uniformly; otherwise use the documented constants.
  bool randomize = false;
  /// Random utilities on [-1, 1] instead of [0, 1].
  bool negative_utilities = false;
};

/**
 * Pig farm with n treatment stages. Nodes are declared H1, T1, D1, H2, ...,
 * Tn, Dn, H(n+1), then value nodes C1..Cn and M.
 *
 * I(Tt) = {Ht}, I(Dt) = {Tt}, I(H(t+1)) = {Ht, Dt}, I(Ct) = {Dt},
 * I(M) = {H(n+1)}. Health states {ill, healthy}, test states
 * {positive, negative}, decision states {treat, pass}.
 *
 * Default constants: P(H1 = ill) = 0.1; P(positive | ill) = 0.8,
 * P(positive | healthy) = 0.1; P(ill next | ill, treat) = 0.5,
 * P(ill next | ill, pass) = 0.9, P(ill next | healthy, treat) = 0.1,
 * P(ill next | healthy, pass) = 0.2; treatment costs 100; the market value
 * M is 300 for an ill pig and 1000 for a healthy one.
 */
InfluenceDiagram gen_pigfarm(int n, const GeneratorOptions& options = {});

/**
 * N-monitoring with n report/action pairs. Nodes are declared L, R1..Rn,
 * A1..An, F, then the value node T.
 *
 * I(Ri) = {L}, I(Ai) = {Ri}, I(F) = {L, A1..An}, I(T) = {F, A1..An}. Load
 * states {high, low}, report states {high, low}, action states
 * {fortify, pass}, failure states {failure, success}.
 *
 * Default constants: P(L = high) = 0.4; each report is correct with
 * probability 0.8; the failure probability is 0.6 under high load and 0.2
 * under low load, halved by every fortifying agent; T = 100 without failure,
 * 0 with failure, minus 10 per fortifying agent.
 */
InfluenceDiagram gen_nmonitoring(int n, const GeneratorOptions& options = {});

enum class TestResult { Positive, Negative };

/// P(CHD | result) for a test with the given sensitivity and specificity.
/// Raises InvalidParams outside [0,1] and DegenerateTest on 0/0.
double bayes_update(double prior, double sensitivity, double specificity, TestResult result);

struct ChdTest {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double cost = 0.0;
};

/// Synthetic placeholder parameters; they do not reproduce any clinical data.
struct ChdParams {
  int risk_levels = 11;
  ChdTest trs{0.9, 0.9, 0.005};
  ChdTest grs{0.7, 0.8, 0.002};
  /// Health benefit indexed [health][treatment], health {no_chd, chd},
  /// treatment {treat, no_treat}.
  double benefit[2][2] = {{0.92, 1.0}, {0.5, 0.1}};
  /// Prior over the risk levels; empty means uniform.
  std::vector<double> prior;
};

struct ChdModel {
  InfluenceDiagram diagram;
  std::vector<ForbiddenPattern> forbidden;
  std::vector<Pin> pins;

  EnumerationOptions enumeration() const { return {forbidden, pins, kDefaultPathCap}; }
};

/// Risk of grid level k out of `levels`: k / (levels - 1).
double risk_level(int level, int levels);

/**
 * CHD testing and treatment diagram. Nodes are declared R0, H, T1, R1, T2,
 * R2, TD, then value nodes TC and HB.
 *
 * Risk nodes carry `risk_levels` grid states. A test moves the risk to the
 * grid level nearest to the Bayes posterior of the result; without a test
 * the risk carries over unchanged. When `prior_level` is given, R0 is a
 * point mass on that level and pinned to it.
 */
ChdModel gen_chd(const ChdParams& params, std::optional<int> prior_level = std::nullopt);

enum class PerPriorSolver { BruteForce, Spu };

struct PerPriorOptions {
  PerPriorSolver solver = PerPriorSolver::BruteForce;
  std::size_t restarts = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct PerPriorRow {
  int level = 0;
  double risk = 0.0;
  double expected_utility = 0.0;
  std::string first_test;   // T1 at this level
  std::string treatment;    // TD if the risk stays at this level
  Strategy strategy;
};

/// Solves the pinned model for every risk level; rows ordered by level.
std::vector<PerPriorRow> solve_per_prior(const ChdParams& params, const PerPriorOptions& options = {});

/// Fixed-width table: level, risk, first test, treatment, expected utility.
std::string format_per_prior(const std::vector<PerPriorRow>& rows);

}  // namespace limid
