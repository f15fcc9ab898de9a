#include "limid/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "limid/error.hpp"

namespace limid {
namespace {

std::string z_name(const InfluenceDiagram& diagram, NodeId j, std::uint64_t info, StateIndex choice) {
  std::string name = "z_" + sanitize_name(diagram.node(j).name) + "__";
  const auto states = diagram.decode_info_state(j, info);
  const auto parents = diagram.parents(j);
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (k > 0) name += '_';
    name += sanitize_name(diagram.node(parents[k]).states[states[k]]);
  }
  return name + "__" + sanitize_name(diagram.node(j).states[choice]);
}

std::string info_suffix(const InfluenceDiagram& diagram, NodeId j, std::uint64_t info) {
  return sanitize_name(diagram.node(j).name) + "__" + sanitize_name(diagram.info_state_label(j, info, "_"));
}

void check_unique_names(const ModelIR& model) {
  std::unordered_set<std::string_view> seen;
  for (const auto& v : model.variables) {
    if (!seen.insert(v.name).second) throw Error(ErrorCode::NameCollision, "variable " + v.name);
  }
  seen.clear();
  for (const auto& c : model.constraints) {
    if (!seen.insert(c.name).second) throw Error(ErrorCode::NameCollision, "row " + c.name);
  }
}

// z-variables and one-hot rows shared by both forms.
ModelIR skeleton(FormulationKind kind, const InfluenceDiagram& diagram, const PathTable& table) {
  if (!diagram.frozen()) throw Error(ErrorCode::NotFrozen, "diagram must be frozen");
  if (table.empty()) throw Error(ErrorCode::EmptyPathTable, "no effective paths");
  if (table.width() != diagram.order().size() || table.unfiltered_count() != diagram.path_count()) {
    throw Error(ErrorCode::ModelMismatch, "path table was built from a different diagram");
  }
  ModelIR model;
  model.kind = kind;
  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    model.z_offset.push_back(model.variables.size());
    model.z_states.push_back(diagram.state_count(j));
    model.z_infos.push_back(diagram.info_state_count(j));
    for (std::uint64_t info = 0; info < diagram.info_state_count(j); ++info) {
      for (StateIndex c = 0; c < diagram.state_count(j); ++c) {
        model.variables.push_back({z_name(diagram, j, info, c), VarKind::Binary, 0.0, 1.0, 0.0});
      }
    }
  }
  model.path_offset = model.variables.size();
  model.path_count = table.size();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    for (std::uint64_t info = 0; info < diagram.info_state_count(j); ++info) {
      LinearConstraint row{"onehot_" + info_suffix(diagram, j, info), RowRole::OneHot, {}, RowSense::Equal, 1.0};
      for (StateIndex c = 0; c < diagram.state_count(j); ++c) row.terms.emplace_back(model.z_index(d, info, c), 1.0);
      model.constraints.push_back(std::move(row));
    }
  }
  return model;
}

}  // namespace

std::string_view to_string(FormulationKind kind) {
  return kind == FormulationKind::Original ? "original" : "improved";
}

std::string sanitize_name(std::string_view raw) {
  std::string out(raw);
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') || ch == '_';
    if (!ok) ch = '_';
  }
  return out;
}

ModelIR build_original(const InfluenceDiagram& diagram, const PathTable& table, const FormulationOptions& options) {
  ModelIR model = skeleton(FormulationKind::Original, diagram, table);
  const auto p = table.probabilities();
  const auto u = table.utilities();
  for (std::size_t i = 0; i < table.size(); ++i) {
    model.variables.push_back({"pi_p" + std::to_string(i), VarKind::Continuous, 0.0, p[i], u[i]});
  }

  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    const auto info = table.decision_info(d);
    const auto own = table.column(diagram.position(j));
    const std::string prefix = "lcp_" + sanitize_name(diagram.node(j).name) + "__p";
    for (std::size_t i = 0; i < table.size(); ++i) {
      model.constraints.push_back({prefix + std::to_string(i),
                                   RowRole::LocalCompatibility,
                                   {{model.path_index(i), 1.0}, {model.z_index(d, info[i], own[i]), -1.0}},
                                   RowSense::LessEqual,
                                   0.0});
    }
  }

  const bool any_negative = std::any_of(u.begin(), u.end(), [](double x) { return x < 0.0; });
  model.lower_bound_rows = options.lower_bound == Toggle::On || (options.lower_bound == Toggle::Auto && any_negative);
  if (model.lower_bound_rows) {
    const double n_decisions = static_cast<double>(decisions.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
      LinearConstraint row{"lb_p" + std::to_string(i), RowRole::LowerBound, {{model.path_index(i), 1.0}},
                           RowSense::GreaterEqual, p[i] - n_decisions};
      for (std::size_t d = 0; d < decisions.size(); ++d) {
        const NodeId j = decisions[d];
        row.terms.emplace_back(model.z_index(d, table.decision_info(d)[i], table.state(i, diagram.position(j))), -1.0);
      }
      model.constraints.push_back(std::move(row));
    }
  }

  model.probability_cut = options.probability_cut.value_or(false);
  if (model.probability_cut) {
    LinearConstraint row{"probcut", RowRole::ProbabilityCut, {}, RowSense::Equal, 1.0};
    for (std::size_t i = 0; i < table.size(); ++i) row.terms.emplace_back(model.path_index(i), 1.0);
    model.constraints.push_back(std::move(row));
  }
  check_unique_names(model);
  return model;
}

ModelIR build_improved(const InfluenceDiagram& diagram, const PathTable& table, const FormulationOptions& options) {
  ModelIR model = skeleton(FormulationKind::Improved, diagram, table);
  const auto p = table.probabilities();
  const auto w = table.weights();
  for (std::size_t i = 0; i < table.size(); ++i) {
    model.variables.push_back({"x_p" + std::to_string(i), VarKind::Continuous, 0.0, 1.0, w[i]});
  }

  const auto decisions = diagram.decision_nodes();
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    const std::size_t n_states = diagram.state_count(j);
    const auto info = table.decision_info(d);
    const auto own = table.column(diagram.position(j));
    std::vector<std::vector<std::size_t>> buckets(diagram.info_state_count(j) * n_states);
    for (std::size_t i = 0; i < table.size(); ++i) buckets[info[i] * n_states + own[i]].push_back(i);
    const auto gammas = gamma_table(diagram, table, j);
    for (std::uint64_t s_info = 0; s_info < diagram.info_state_count(j); ++s_info) {
      for (StateIndex c = 0; c < n_states; ++c) {
        const std::size_t key = s_info * n_states + c;
        LinearConstraint row{
            "lcp_" + info_suffix(diagram, j, s_info) + "__" + sanitize_name(diagram.node(j).states[c]),
            RowRole::LocalCompatibility, {}, RowSense::LessEqual, 0.0};
        for (std::size_t i : buckets[key]) row.terms.emplace_back(model.path_index(i), 1.0);
        if (gammas[key] != 0) row.terms.emplace_back(model.z_index(d, s_info, c), -static_cast<double>(gammas[key]));
        model.constraints.push_back(std::move(row));
      }
    }
  }

  model.probability_cut = options.probability_cut.value_or(true);
  if (model.probability_cut) {
    LinearConstraint row{"probcut", RowRole::ProbabilityCut, {}, RowSense::Equal, 1.0};
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (p[i] != 0.0) row.terms.emplace_back(model.path_index(i), p[i]);
    }
    model.constraints.push_back(std::move(row));
  }
  check_unique_names(model);
  return model;
}

ModelIR build(FormulationKind kind, const InfluenceDiagram& diagram, const PathTable& table,
              const FormulationOptions& options) {
  return kind == FormulationKind::Original ? build_original(diagram, table, options)
                                           : build_improved(diagram, table, options);
}

std::vector<double> strategy_to_assignment(const ModelIR& model, const InfluenceDiagram& diagram,
                                           const PathTable& table, const Strategy& strategy) {
  validate_strategy(diagram, strategy);
  const auto decisions = diagram.decision_nodes();
  bool layout_ok = model.path_count == table.size() && model.z_offset.size() == decisions.size() &&
                   model.variables.size() == model.path_offset + model.path_count;
  for (std::size_t d = 0; layout_ok && d < decisions.size(); ++d) {
    layout_ok = model.z_states[d] == diagram.state_count(decisions[d]) &&
                model.z_infos[d] == diagram.info_state_count(decisions[d]);
  }
  if (!layout_ok) throw Error(ErrorCode::ModelMismatch, "model does not match the diagram and path table");

  std::vector<double> values(model.variables.size(), 0.0);
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const auto& choices = strategy.locals[d].choices;
    for (std::uint64_t info = 0; info < choices.size(); ++info) values[model.z_index(d, info, choices[info])] = 1.0;
  }
  const auto p = table.probabilities();
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!is_compatible(diagram, table, strategy, i)) continue;
    values[model.path_index(i)] = model.kind == FormulationKind::Original ? p[i] : 1.0;
  }
  return values;
}

double objective_value(const ModelIR& model, const std::vector<double>& values) {
  if (values.size() != model.variables.size()) throw Error(ErrorCode::ModelMismatch, "assignment size");
  double obj = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (model.variables[k].objective != 0.0 && values[k] != 0.0) obj += model.variables[k].objective * values[k];
  }
  return obj;
}

std::optional<std::string> first_violation(const ModelIR& model, const std::vector<double>& values, double tol) {
  if (values.size() != model.variables.size()) throw Error(ErrorCode::ModelMismatch, "assignment size");
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& v = model.variables[k];
    if (values[k] < v.lower - tol || values[k] > v.upper + tol) return "bound " + v.name;
    if (v.kind == VarKind::Binary && std::min(std::abs(values[k]), std::abs(values[k] - 1.0)) > tol) {
      return "integrality " + v.name;
    }
  }
  for (const auto& row : model.constraints) {
    double lhs = 0.0;
    for (const auto& [var, coef] : row.terms) lhs += coef * values[var];
    const bool ok = (row.sense == RowSense::LessEqual && lhs <= row.rhs + tol) ||
                    (row.sense == RowSense::GreaterEqual && lhs >= row.rhs - tol) ||
                    (row.sense == RowSense::Equal && std::abs(lhs - row.rhs) <= tol);
    if (!ok) return "row " + row.name;
  }
  return std::nullopt;
}

FormulationStats stats(const ModelIR& model) {
  FormulationStats s;
  for (const auto& v : model.variables) (v.kind == VarKind::Binary ? s.n_binary : s.n_continuous) += 1;
  s.n_constraints = model.constraints.size();
  s.n_structural_rows = static_cast<std::size_t>(std::count_if(
      model.constraints.begin(), model.constraints.end(),
      [](const LinearConstraint& c) { return c.role != RowRole::ProbabilityCut; }));
  s.n_bounds = 2 * s.n_continuous;
  return s;
}

std::uint64_t predicted_original_count(const InfluenceDiagram& diagram) {
  const std::uint64_t paths = diagram.path_count();
  std::uint64_t total = saturating_mul(3 + diagram.decision_nodes().size(), paths);
  for (NodeId j : diagram.decision_nodes()) total += diagram.info_state_count(j);
  return total;
}

std::uint64_t predicted_improved_count(const InfluenceDiagram& diagram) {
  std::uint64_t total = saturating_mul(2, diagram.path_count());
  for (NodeId j : diagram.decision_nodes()) total += (1 + diagram.state_count(j)) * diagram.info_state_count(j);
  return total;
}

ScaledDiagram scale_utilities(const InfluenceDiagram& diagram, const ScaleMode& mode) {
  if (!diagram.frozen()) throw Error(ErrorCode::NotFrozen, "diagram must be frozen");
  const auto values = diagram.value_nodes();
  ScaledDiagram out{diagram, {}};
  if (mode.kind == ScaleMode::Kind::Affine) {
    if (!(mode.a > 0.0)) throw Error(ErrorCode::NonPositiveScale, "scale must be positive");
    if (values.empty() && mode.b != 0.0) {
      throw Error(ErrorCode::InvalidParams, "cannot shift utilities of a diagram without value nodes");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      const auto current = diagram.utilities(values[k]);
      std::vector<double> table(current.begin(), current.end());
      for (double& x : table) x = mode.a * x + (k == 0 ? mode.b : 0.0);
      out.diagram = out.diagram.with_utilities(values[k], std::move(table));
    }
    out.transform = {mode.a, mode.b};
    return out;
  }
  double shift = 0.0;
  for (NodeId v : values) {
    const auto current = diagram.utilities(v);
    const double lowest = *std::min_element(current.begin(), current.end());
    if (lowest >= 0.0) continue;
    std::vector<double> table(current.begin(), current.end());
    for (double& x : table) x -= lowest;
    out.diagram = out.diagram.with_utilities(v, std::move(table));
    shift -= lowest;
  }
  out.transform = {1.0, shift};
  return out;
}

}  // namespace limid
