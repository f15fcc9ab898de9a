#include "limid/io.hpp"

#include <fstream>
#include <sstream>

#include "limid/error.hpp"

namespace limid {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail(where + ": missing \"" + key + "\"");
  return *it;
}

std::string as_string(const json& j, const std::string& where) {
  if (!j.is_string()) parse_fail(where + ": expected a string");
  return j.get<std::string>();
}

std::vector<std::string> as_strings(const json& j, const std::string& where) {
  if (!j.is_array()) parse_fail(where + ": expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : j) out.push_back(as_string(e, where));
  return out;
}

void flatten(const json& j, std::vector<double>& out, const std::string& where) {
  if (j.is_number()) {
    out.push_back(j.get<double>());
  } else if (j.is_array()) {
    for (const auto& e : j) flatten(e, out, where);
  } else {
    parse_fail(where + ": expected numbers");
  }
}

NodeKind parse_kind(const std::string& text, const std::string& where) {
  if (text == "chance") return NodeKind::Chance;
  if (text == "decision") return NodeKind::Decision;
  if (text == "value") return NodeKind::Value;
  parse_fail(where + ": unknown kind \"" + text + "\"");
}

Node parse_node(const json& j, std::size_t index) {
  const std::string where = "nodes[" + std::to_string(index) + "]";
  if (!j.is_object()) parse_fail(where + ": expected an object");
  Node n;
  n.name = as_string(require(j, "name", where), where + ".name");
  n.kind = parse_kind(as_string(require(j, "kind", where), where + ".kind"), where + ".kind");
  if (auto it = j.find("states"); it != j.end()) n.states = as_strings(*it, where + ".states");
  if (auto it = j.find("info_set"); it != j.end()) n.info_set = as_strings(*it, where + ".info_set");
  return n;
}

DiagramFile parse_document(const json& doc) {
  if (!doc.is_object()) parse_fail("top level: expected an object");
  const json& nodes_json = require(doc, "nodes", "top level");
  if (!nodes_json.is_array()) parse_fail("nodes: expected an array");
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < nodes_json.size(); ++i) nodes.push_back(parse_node(nodes_json[i], i));

  DiagramFile file;
  auto& d = file.diagram;
  d.add_nodes(nodes);

  if (auto it = doc.find("probabilities"); it != doc.end()) {
    if (!it->is_object()) parse_fail("probabilities: expected an object");
    for (const auto& [name, table] : it->items()) {
      std::vector<double> flat;
      flatten(table, flat, "probabilities." + name);
      const std::size_t k = d.state_count(d.id(name));
      if (k == 0 || flat.size() % k != 0) {
        throw Error(ErrorCode::DimensionMismatch, name + ": " + std::to_string(flat.size()) + " entries");
      }
      std::vector<std::vector<double>> rows;
      for (std::size_t r = 0; r < flat.size(); r += k) rows.emplace_back(flat.begin() + r, flat.begin() + r + k);
      d.set_probabilities(name, rows);
    }
  }
  if (auto it = doc.find("utilities"); it != doc.end()) {
    if (!it->is_object()) parse_fail("utilities: expected an object");
    for (const auto& [name, table] : it->items()) {
      std::vector<double> flat;
      flatten(table, flat, "utilities." + name);
      d.set_utilities(name, std::move(flat));
    }
  }
  d.freeze();

  if (auto it = doc.find("forbidden"); it != doc.end()) {
    if (!it->is_array()) parse_fail("forbidden: expected an array");
    for (std::size_t p = 0; p < it->size(); ++p) {
      const std::string where = "forbidden[" + std::to_string(p) + "]";
      const json& group = (*it)[p];
      if (!group.is_array()) parse_fail(where + ": expected an array of terms");
      std::vector<std::pair<std::string, std::vector<std::string>>> terms;
      for (const auto& term : group) {
        if (!term.is_object()) parse_fail(where + ": expected {node, states}");
        terms.emplace_back(as_string(require(term, "node", where), where + ".node"),
                           as_strings(require(term, "states", where), where + ".states"));
      }
      file.enumeration.forbidden.push_back(make_pattern(d, terms));
    }
  }
  if (auto it = doc.find("fixed"); it != doc.end()) {
    if (!it->is_object()) parse_fail("fixed: expected an object");
    for (const auto& [name, state] : it->items()) {
      file.enumeration.pins.push_back(make_pin(d, name, as_string(state, "fixed." + name)));
    }
  }
  if (auto it = doc.find("family"); it != doc.end()) {
    if (!it->is_object()) parse_fail("family: expected an object");
    const json& n = require(*it, "n", "family");
    if (!n.is_number_integer()) parse_fail("family.n: expected an integer");
    file.family = Family{as_string(require(*it, "name", "family"), "family.name"), n.get<int>()};
  }
  return file;
}

}  // namespace

DiagramFile parse_diagram(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
  try {
    return parse_document(doc);
  } catch (const json::exception& e) {
    parse_fail(e.what());
  }
}

DiagramFile load_diagram(const std::string& path) { return parse_diagram(read_file(path)); }

nlohmann::ordered_json diagram_to_json(const InfluenceDiagram& d, const EnumerationOptions& enumeration,
                                       const std::optional<Family>& family) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  ordered_json probabilities = ordered_json::object();
  ordered_json utilities = ordered_json::object();
  for (NodeId id = 0; id < d.node_count(); ++id) {
    const Node& n = d.node(id);
    ordered_json node;
    node["name"] = n.name;
    node["kind"] = std::string(to_string(n.kind));
    if (n.kind != NodeKind::Value) node["states"] = n.states;
    node["info_set"] = n.info_set;
    doc["nodes"].push_back(std::move(node));

    if (n.kind == NodeKind::Chance && d.has_tensor(id)) {
      const auto flat = d.probabilities(id);
      const std::size_t k = d.state_count(id);
      ordered_json rows = ordered_json::array();
      for (std::size_t r = 0; r < flat.size(); r += k) rows.push_back(std::vector<double>(flat.begin() + r, flat.begin() + r + k));
      probabilities[n.name] = std::move(rows);
    } else if (n.kind == NodeKind::Value && d.has_tensor(id)) {
      const auto u = d.utilities(id);
      utilities[n.name] = std::vector<double>(u.begin(), u.end());
    }
  }
  doc["probabilities"] = std::move(probabilities);
  doc["utilities"] = std::move(utilities);
  if (!enumeration.forbidden.empty()) {
    ordered_json forbidden = ordered_json::array();
    for (const auto& pattern : enumeration.forbidden) {
      ordered_json group = ordered_json::array();
      for (const auto& term : pattern.terms) {
        std::vector<std::string> states;
        for (const StateIndex s : term.states) states.push_back(d.node(term.node).states[s]);
        group.push_back({{"node", d.node(term.node).name}, {"states", states}});
      }
      forbidden.push_back(std::move(group));
    }
    doc["forbidden"] = std::move(forbidden);
  }
  if (!enumeration.pins.empty()) {
    ordered_json fixed = ordered_json::object();
    for (const auto& pin : enumeration.pins) fixed[d.node(pin.node).name] = d.node(pin.node).states[pin.state];
    doc["fixed"] = std::move(fixed);
  }
  if (family) doc["family"] = {{"name", family->name}, {"n", family->n}};
  return doc;
}

nlohmann::ordered_json strategy_to_json(const InfluenceDiagram& d, const Strategy& strategy) {
  validate_strategy(d, strategy);
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& local : strategy.locals) {
    nlohmann::ordered_json map = nlohmann::ordered_json::object();
    const Node& n = d.node(local.owner);
    for (std::uint64_t info = 0; info < local.choices.size(); ++info) {
      map[d.info_state_label(local.owner, info)] = n.states[local.choices[info]];
    }
    out[n.name] = std::move(map);
  }
  return out;
}

Strategy strategy_from_json(const InfluenceDiagram& d, const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidStrategy, "expected an object");
  Strategy z;
  for (const NodeId id : d.decision_nodes()) {
    const Node& n = d.node(id);
    auto it = j.find(n.name);
    if (it == j.end() || !it->is_object()) throw Error(ErrorCode::InvalidStrategy, "missing decision " + n.name);
    const std::uint64_t infos = d.info_state_count(id);
    if (it->size() != infos) {
      throw Error(ErrorCode::InvalidStrategy, n.name + ": expected " + std::to_string(infos) + " entries");
    }
    LocalStrategy local{id, std::vector<StateIndex>(infos, 0)};
    for (std::uint64_t info = 0; info < infos; ++info) {
      const std::string label = d.info_state_label(id, info);
      auto entry = it->find(label);
      if (entry == it->end() || !entry->is_string()) {
        throw Error(ErrorCode::InvalidStrategy, n.name + ": missing entry \"" + label + "\"");
      }
      const auto s = d.find_state(id, entry->get<std::string>());
      if (!s) throw Error(ErrorCode::InvalidStrategy, n.name + ": unknown state " + entry->get<std::string>());
      local.choices[info] = *s;
    }
    z.locals.push_back(std::move(local));
  }
  if (j.size() != z.locals.size()) throw Error(ErrorCode::InvalidStrategy, "unknown decision node in strategy");
  return z;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoError, "cannot read " + path);
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
}

}  // namespace limid
