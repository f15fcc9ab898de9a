#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "limid/diagram.hpp"
#include "limid/paths.hpp"
#include "limid/strategy.hpp"

namespace limid {

enum class VarKind { Binary, Continuous };

struct VariableDef {
  std::string name;
  VarKind kind = VarKind::Continuous;
  double lower = 0.0;
  double upper = 1.0;
  double objective = 0.0;
};

enum class RowSense { LessEqual, Equal, GreaterEqual };

enum class RowRole {
  OneHot,              // Σ_{s_j} z(s_j|s_I(j)) = 1
  LocalCompatibility,  // π(s) ≤ z (original) or Σ x(s) ≤ Γ z (improved)
  LowerBound,          // π(s) ≥ p(s) + Σ_j z − |D|
  ProbabilityCut,      // Σ π(s) = 1 or Σ p(s)x(s) = 1
};

struct LinearConstraint {
  std::string name;
  RowRole role = RowRole::OneHot;
  std::vector<std::pair<std::size_t, double>> terms;  // (variable index, coefficient), no zeros
  RowSense sense = RowSense::LessEqual;
  double rhs = 0.0;
};

enum class FormulationKind { Original, Improved };

std::string_view to_string(FormulationKind kind);

enum class Toggle { Auto, On, Off };

struct FormulationOptions {
  /// Lower-bound rows of the original form; Auto includes them iff some U(s) < 0.
  Toggle lower_bound = Toggle::Auto;
  /// Probability cut row; defaults to off for the original form, on for the improved one.
  std::optional<bool> probability_cut;
};

/**
 * Solver-agnostic MILP, always a maximization.
 *
 * Variable layout: all z-variables first (decision nodes in topological
 * order, information states ascending, alternatives ascending), then one
 * path variable per effective path in path index order.
 */
struct ModelIR {
  FormulationKind kind = FormulationKind::Improved;
  std::vector<VariableDef> variables;
  std::vector<LinearConstraint> constraints;
  bool lower_bound_rows = false;
  bool probability_cut = false;

  std::vector<std::size_t> z_offset;  // per decision slot
  std::vector<std::size_t> z_states;  // |S_j| per decision slot
  std::vector<std::uint64_t> z_infos; // |S_I(j)| per decision slot
  std::size_t path_offset = 0;
  std::size_t path_count = 0;

  std::size_t z_index(std::size_t slot, std::uint64_t info, StateIndex choice) const {
    return z_offset[slot] + info * z_states[slot] + choice;
  }
  std::size_t path_index(std::size_t path) const { return path_offset + path; }
};

ModelIR build_original(const InfluenceDiagram& diagram, const PathTable& table, const FormulationOptions& options = {});
ModelIR build_improved(const InfluenceDiagram& diagram, const PathTable& table, const FormulationOptions& options = {});
ModelIR build(FormulationKind kind, const InfluenceDiagram& diagram, const PathTable& table,
              const FormulationOptions& options = {});

/// z from the strategy; x(s) = 1 or π(s) = p(s) on compatible paths, else 0.
std::vector<double> strategy_to_assignment(const ModelIR& model, const InfluenceDiagram& diagram,
                                           const PathTable& table, const Strategy& strategy);

double objective_value(const ModelIR& model, const std::vector<double>& values);

/// Name of the first violated row or bound (tolerance `tol`), or nullopt.
std::optional<std::string> first_violation(const ModelIR& model, const std::vector<double>& values, double tol = 1e-9);

struct FormulationStats {
  std::size_t n_binary = 0;
  std::size_t n_continuous = 0;
  std::size_t n_constraints = 0;      // all rows, probability cut included
  std::size_t n_structural_rows = 0;  // rows without the probability cut
  std::size_t n_bounds = 0;           // two per path variable
  /// Rows counted the way the closed-form size formulas count them:
  /// structural rows plus two bounds per path variable.
  std::size_t closed_form_count() const { return n_structural_rows + n_bounds; }
};

FormulationStats stats(const ModelIR& model);

/// (3+|D|)|S| + Σ_j |S_I(j)|, over the unfiltered path set.
std::uint64_t predicted_original_count(const InfluenceDiagram& diagram);
/// 2|S| + Σ_j (1+|S_j|)|S_I(j)|, over the unfiltered path set.
std::uint64_t predicted_improved_count(const InfluenceDiagram& diagram);

/// Variable and row names use this character set; anything else becomes '_'.
std::string sanitize_name(std::string_view raw);

struct UtilityTransform {
  double scale = 1.0;
  double shift = 0.0;
  /// Maps an expected utility of the transformed diagram back.
  double to_original(double eu) const { return (eu - shift) / scale; }
};

struct ScaleMode {
  enum class Kind { ShiftNonnegative, Affine } kind = Kind::ShiftNonnegative;
  double a = 1.0;
  double b = 0.0;

  static ScaleMode shift_nonnegative() { return {}; }
  static ScaleMode affine(double a, double b) { return {Kind::Affine, a, b}; }
};

struct ScaledDiagram {
  InfluenceDiagram diagram;
  UtilityTransform transform;
};

/// Transforms every utility table so that U'(s) = a·U(s) + b on every path.
ScaledDiagram scale_utilities(const InfluenceDiagram& diagram, const ScaleMode& mode);

}  // namespace limid
