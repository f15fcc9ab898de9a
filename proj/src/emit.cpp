#include "limid/emit.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "limid/error.hpp"

namespace limid {
namespace {

void check_names(const ModelIR& model) {
  std::unordered_set<std::string_view> seen;
  const auto check = [&](const std::string& name, const char* what) {
    if (name.empty() || name.size() > kMaxNameLength) {
      throw Error(ErrorCode::InvalidParams, std::string(what) + " name length out of range: " + name);
    }
    if (name != sanitize_name(name)) throw Error(ErrorCode::InvalidParams, std::string(what) + " name " + name);
    if (!seen.insert(name).second) throw Error(ErrorCode::NameCollision, std::string(what) + " " + name);
  };
  for (const auto& v : model.variables) check(v.name, "variable");
  seen.clear();
  for (const auto& c : model.constraints) check(c.name, "row");
}

// Accumulates tokens into lines no wider than kMaxLineWidth.
class LineWriter {
 public:
  explicit LineWriter(std::string& out) : out_(out) {}

  void begin(std::string_view head) {
    line_.assign(" ");
    line_ += head;
  }
  void token(std::string_view tok) {
    if (line_.size() + 1 + tok.size() > kMaxLineWidth) {
      out_ += line_;
      out_ += '\n';
      line_.assign(" ");
    } else {
      line_ += ' ';
    }
    line_ += tok;
  }
  void end() {
    out_ += line_;
    out_ += '\n';
    line_.clear();
  }

 private:
  std::string& out_;
  std::string line_;
};

std::string term_token(double coef, const std::string& name, bool first) {
  std::string tok;
  if (coef < 0.0) {
    tok = first ? "-" : "- ";
  } else if (!first) {
    tok = "+ ";
  }
  const double mag = std::abs(coef);
  if (mag != 1.0) tok += format_number(mag) + " ";
  return tok + name;
}

std::string_view sense_text(RowSense sense) {
  switch (sense) {
    case RowSense::LessEqual: return "<=";
    case RowSense::GreaterEqual: return ">=";
    case RowSense::Equal: return "=";
  }
  return "=";
}

std::string pad(std::string_view text, std::size_t width) {
  std::string s(text);
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string mps_entry(std::string_view a, std::string_view b, std::string_view value) {
  return "    " + pad(a, 8) + "  " + pad(b, 8) + "  " + std::string(value) + "\n";
}

}  // namespace

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string write_lp(const ModelIR& model) {
  check_names(model);
  std::string out;
  out += "\\ limid " + std::string(to_string(model.kind)) + " formulation\n";
  out += "Maximize\n";
  LineWriter w(out);
  w.begin("obj:");
  bool first = true;
  for (const auto& v : model.variables) {
    if (v.objective == 0.0) continue;
    w.token(term_token(v.objective, v.name, first));
    first = false;
  }
  if (first) w.token("0 " + model.variables.front().name);
  w.end();

  out += "Subject To\n";
  for (const auto& row : model.constraints) {
    w.begin(row.name + ":");
    first = true;
    for (const auto& [var, coef] : row.terms) {
      w.token(term_token(coef, model.variables[var].name, first));
      first = false;
    }
    if (first) w.token("0 " + model.variables.front().name);
    w.token(std::string(sense_text(row.sense)));
    w.token(format_number(row.rhs));
    w.end();
  }

  out += "Bounds\n";
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::Binary) continue;
    out += " " + format_number(v.lower) + " <= " + v.name + " <= " + format_number(v.upper) + "\n";
  }
  out += "Binary\n";
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::Binary) out += " " + v.name + "\n";
  }
  out += "End\n";
  return out;
}

std::string write_mps(const ModelIR& model) {
  check_names(model);
  std::vector<std::vector<std::pair<std::size_t, double>>> columns(model.variables.size());
  for (std::size_t r = 0; r < model.constraints.size(); ++r) {
    for (const auto& [var, coef] : model.constraints[r].terms) columns[var].emplace_back(r, coef);
  }

  std::string out;
  out += "NAME          limid_" + std::string(to_string(model.kind)) + "\n";
  out += "OBJSENSE\n    MAX\n";
  out += "ROWS\n";
  out += " N  obj\n";
  for (const auto& row : model.constraints) {
    const char* type = row.sense == RowSense::LessEqual ? "L" : row.sense == RowSense::GreaterEqual ? "G" : "E";
    out += std::string(" ") + type + "  " + row.name + "\n";
  }
  out += "COLUMNS\n";
  for (std::size_t k = 0; k < model.variables.size(); ++k) {
    const auto& v = model.variables[k];
    if (v.objective != 0.0) out += mps_entry(v.name, "obj", format_number(v.objective));
    for (const auto& [r, coef] : columns[k]) out += mps_entry(v.name, model.constraints[r].name, format_number(coef));
    if (v.objective == 0.0 && columns[k].empty()) out += mps_entry(v.name, "obj", "0");
  }
  out += "RHS\n";
  for (const auto& row : model.constraints) {
    if (row.rhs != 0.0) out += mps_entry("RHS", row.name, format_number(row.rhs));
  }
  out += "BOUNDS\n";
  for (const auto& v : model.variables) {
    if (v.kind == VarKind::Binary) {
      out += " BV BND       " + v.name + "\n";
      continue;
    }
    if (v.lower != 0.0) out += " LO BND       " + pad(v.name, 8) + "  " + format_number(v.lower) + "\n";
    out += " UP BND       " + pad(v.name, 8) + "  " + format_number(v.upper) + "\n";
  }
  out += "ENDATA\n";
  return out;
}

std::string write_solution(const ModelIR& model, const std::vector<double>& values) {
  if (values.size() != model.variables.size()) throw Error(ErrorCode::ModelMismatch, "assignment size");
  std::string out = "# limid solution, " + std::string(to_string(model.kind)) + " formulation\n";
  out += "=obj= " + format_number(objective_value(model, values)) + "\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    out += model.variables[k].name + " " + format_number(values[k]) + "\n";
  }
  return out;
}

SolutionReport read_solution(const ModelIR& model, const InfluenceDiagram& diagram, const PathTable& table,
                             std::string_view text) {
  std::unordered_map<std::string_view, std::size_t> by_name;
  for (std::size_t k = 0; k < model.variables.size(); ++k) by_name.emplace(model.variables[k].name, k);

  SolutionReport report;
  std::vector<double> values(model.variables.size(), 0.0);
  std::istringstream lines{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string name, value_text, extra;
    if (!(fields >> name) || name.front() == '#') continue;
    if (!(fields >> value_text) || (fields >> extra)) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected `name value`");
    }
    double value = 0.0;
    const auto res = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (res.ec != std::errc() || res.ptr != value_text.data() + value_text.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number " + value_text);
    }
    if (name == "=obj=") {
      report.file_objective = value;
      continue;
    }
    auto it = by_name.find(name);
    if (it == by_name.end()) throw Error(ErrorCode::UnknownVariable, name);
    values[it->second] = value;
  }

  const auto decisions = diagram.decision_nodes();
  if (model.z_offset.size() != decisions.size()) throw Error(ErrorCode::ModelMismatch, "decision count");
  for (std::size_t d = 0; d < decisions.size(); ++d) {
    const NodeId j = decisions[d];
    LocalStrategy local{j, std::vector<StateIndex>(model.z_infos[d], 0)};
    for (std::uint64_t info = 0; info < model.z_infos[d]; ++info) {
      std::size_t chosen = 0;
      for (StateIndex c = 0; c < model.z_states[d]; ++c) {
        const std::size_t var = model.z_index(d, info, c);
        const double v = values[var];
        if (std::min(std::abs(v), std::abs(v - 1.0)) > 1e-6) {
          report.warnings.push_back("fractional value " + format_number(v) + " for " + model.variables[var].name);
        }
        if (v >= 0.5) {
          ++chosen;
          local.choices[info] = c;
        }
      }
      if (chosen != 1) {
        throw Error(ErrorCode::NotOneHot, std::to_string(chosen) + " alternatives chosen at " + diagram.node(j).name +
                                              ",(" + diagram.info_state_label(j, info) + ")");
      }
    }
    report.strategy.locals.push_back(std::move(local));
  }
  report.expected_utility = expected_utility(diagram, table, report.strategy);
  return report;
}

}  // namespace limid
