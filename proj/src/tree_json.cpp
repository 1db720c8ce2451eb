#include <cstdint>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "scssim/cupid.hpp"
#include "scssim/error.hpp"

namespace scssim {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& what) {
  throw Error(ErrorKind::SchemaViolation, "invalid tree JSON: " + what);
}

int require_int(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    schema_error(std::string("\"") + key + "\" must be an integer");
  }
  const auto v = it->get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    schema_error(std::string("\"") + key + "\" out of range");
  }
  return static_cast<int>(v);
}

std::string require_string(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    schema_error(std::string("\"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::string tree_to_json(const CupidTree& tree) {
  json cuts = json::array();
  for (const CupidNode& node : tree.nodes()) {
    cuts.push_back({
        {"order", node.cut.order},
        {"axis", node.cut.axis == Axis::Horizontal ? "H" : "V"},
        {"offset", node.cut.offset},
        {"parent_extent", node.cut.parent_extent},
        {"gain", node.cut.gain},
        {"parent", node.parent},
        {"side", node.side == Side::Left ? "L" : "R"},
    });
  }
  json doc = {
      {"source", {{"w", tree.source_width()}, {"h", tree.source_height()}}},
      {"cuts", std::move(cuts)},
  };
  return doc.dump(2) + "\n";
}

CupidTree tree_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(e.what());
  }
  if (!doc.is_object()) schema_error("top level must be an object");
  const auto source = doc.find("source");
  if (source == doc.end() || !source->is_object()) schema_error("missing \"source\"");
  const int width = require_int(*source, "w");
  const int height = require_int(*source, "h");

  const auto cuts = doc.find("cuts");
  if (cuts == doc.end() || !cuts->is_array()) schema_error("missing \"cuts\" array");
  if (cuts->empty()) schema_error("a tree needs at least one cut");

  std::vector<CupidNode> nodes;
  nodes.reserve(cuts->size());
  std::vector<bool> seen(cuts->size() + 1, false);
  for (const json& item : *cuts) {
    if (!item.is_object()) schema_error("cut entries must be objects");
    CupidNode node;
    node.cut.order = require_int(item, "order");
    if (node.cut.order < 1 || node.cut.order > static_cast<int>(cuts->size()) ||
        seen[static_cast<std::size_t>(node.cut.order)]) {
      schema_error("order values must be a permutation of 1..n");
    }
    seen[static_cast<std::size_t>(node.cut.order)] = true;

    const std::string axis = require_string(item, "axis");
    if (axis != "H" && axis != "V") schema_error("axis must be \"H\" or \"V\"");
    node.cut.axis = axis == "H" ? Axis::Horizontal : Axis::Vertical;

    node.cut.offset = require_int(item, "offset");
    node.cut.parent_extent = require_int(item, "parent_extent");
    if (node.cut.parent_extent < 2 || node.cut.offset < 1 ||
        node.cut.offset > node.cut.parent_extent - 1) {
      schema_error("offset must lie in [1, parent_extent-1]");
    }

    const auto gain = item.find("gain");
    if (gain == item.end() || !gain->is_number()) schema_error("\"gain\" must be a number");
    node.cut.gain = gain->get<double>();

    node.parent = require_int(item, "parent");
    const std::string side = require_string(item, "side");
    if (side != "L" && side != "R") schema_error("side must be \"L\" or \"R\"");
    node.side = side == "L" ? Side::Left : Side::Right;
    nodes.push_back(node);
  }
  return CupidTree(width, height, std::move(nodes));
}

}  // namespace scssim
