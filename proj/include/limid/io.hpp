#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "limid/diagram.hpp"
#include "limid/paths.hpp"
#include "limid/strategy.hpp"

namespace limid {

/// Benchmark family tag written by the generators, used to print the
/// closed-form size predictions.
struct Family {
  std::string name;  // "pigfarm" or "nmonitoring"
  int n = 0;
};

struct DiagramFile {
  InfluenceDiagram diagram;  // frozen
  EnumerationOptions enumeration;
  std::optional<Family> family;
};

/**
 * Diagram JSON:
 *
 *   { "nodes": [ {"name", "kind", "states", "info_set"}, ... ],
 *     "probabilities": { name: nested row-major array },
 *     "utilities": { name: array },
 *     "forbidden": [ [ {"node", "states"}, ... ], ... ],
 *     "fixed": { name: state },
 *     "family": {"name", "n"} }
 *
 * Only "nodes" is required. Nodes may be listed in any order. Malformed JSON
 * raises ParseError; diagram rule violations raise their own codes.
 */
DiagramFile parse_diagram(std::string_view text);
DiagramFile load_diagram(const std::string& path);

nlohmann::ordered_json diagram_to_json(const InfluenceDiagram& diagram, const EnumerationOptions& enumeration = {},
                                       const std::optional<Family>& family = std::nullopt);

/// { node: { "parent,states": "choice" } }; root decisions use the key "".
nlohmann::ordered_json strategy_to_json(const InfluenceDiagram& diagram, const Strategy& strategy);
/// Inverse of strategy_to_json; raises InvalidStrategy for missing or unknown entries.
Strategy strategy_from_json(const InfluenceDiagram& diagram, const nlohmann::json& json);

/// Raises IoError.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace limid
