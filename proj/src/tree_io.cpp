#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "mtlab/error.hpp"
#include "mtlab/io.hpp"

namespace mtlab {

using nlohmann::json;

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json_file(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write " + path);
  out << doc.dump(1) << '\n';
}

json tree_to_json(const MeasureTree& tree) {
  json nodes = json::array();
  for (std::size_t i = 0; i < tree.size(); ++i) {
    const NodeId id{static_cast<std::uint32_t>(i)};
    const auto parent = tree.parent(id);
    nodes.push_back({{"id", i}, {"parent", parent ? json(parent->value) : json(nullptr)}, {"measure", tree.measure(id)}});
  }
  return {{"format", "mtlab-tree"}, {"version", kFileFormatVersion}, {"root", tree.root().value}, {"nodes", nodes}};
}

MeasureTree tree_from_json(const json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
      throw FormatError("tree document needs a 'nodes' array");
    }
    const auto& nodes = doc["nodes"];
    const std::size_t n = nodes.size();
    std::vector<std::optional<NodeId>> parents(n);
    std::vector<double> measures(n, 0.0);
    std::vector<bool> seen(n, false);
    for (const auto& entry : nodes) {
      const auto id = entry.at("id").get<std::size_t>();
      if (id >= n) throw FormatError("node " + std::to_string(id) + ": ids must be dense in [0, " + std::to_string(n) + ")");
      if (seen[id]) throw FormatError("node " + std::to_string(id) + ": duplicate id");
      seen[id] = true;
      const auto& parent = entry.at("parent");
      if (!parent.is_null()) parents[id] = NodeId{parent.get<std::uint32_t>()};
      measures[id] = entry.at("measure").get<double>();
    }
    MeasureTree tree = MeasureTree::from_parents(parents, measures);
    if (doc.contains("root") && doc["root"].get<std::uint32_t>() != tree.root().value) {
      throw FormatError("node " + std::to_string(doc["root"].get<std::uint32_t>()) +
                        ": declared root has a parent (actual root is node " + std::to_string(tree.root().value) + ")");
    }
    return tree;
  } catch (const json::exception& e) {
    throw FormatError(std::string("tree document: ") + e.what());
  }
}

MeasureTree load_tree(const std::string& path) { return tree_from_json(read_json_file(path)); }

void store_tree(const MeasureTree& tree, const std::string& path) { write_json_file(tree_to_json(tree), path); }

json function_to_json(const StepFunction& phi, const std::string& tree_path) {
  json values = json::array();
  const auto& t = phi.tree();
  for (std::size_t s = 0; s < t.leaf_count(); ++s) {
    values.push_back({{"leaf_id", t.leaf_at(s).value}, {"value", phi.value(s)}});
  }
  json doc{{"format", "mtlab-function"}, {"version", kFileFormatVersion}};
  doc["tree"] = tree_path.empty() ? tree_to_json(t) : json(tree_path);
  doc["leaf_values"] = values;
  return doc;
}

StepFunction function_from_json(const json& doc, const std::string& base_dir) {
  try {
    if (!doc.is_object() || !doc.contains("tree")) throw FormatError("function document needs a 'tree'");
    MeasureTree tree;
    if (doc["tree"].is_string()) {
      std::filesystem::path p(doc["tree"].get<std::string>());
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      tree = load_tree(p.string());
    } else {
      tree = tree_from_json(doc["tree"]);
    }
    auto shared = share(std::move(tree));
    std::vector<double> values(shared->leaf_count(), 0.0);
    std::vector<bool> seen(shared->leaf_count(), false);
    for (const auto& entry : doc.at("leaf_values")) {
      const NodeId id{entry.at("leaf_id").get<std::uint32_t>()};
      if (!shared->valid(id) || !shared->is_leaf(id)) {
        throw FormatError("node " + std::to_string(id.value) + ": leaf value given for a non-leaf");
      }
      const std::size_t slot = shared->leaf_slot(id);
      if (seen[slot]) throw FormatError("node " + std::to_string(id.value) + ": duplicate leaf value");
      seen[slot] = true;
      values[slot] = entry.at("value").get<double>();
      if (!(values[slot] >= 0.0)) throw FormatError("node " + std::to_string(id.value) + ": negative value");
    }
    for (std::size_t s = 0; s < seen.size(); ++s) {
      if (!seen[s]) throw FormatError("node " + std::to_string(shared->leaf_at(s).value) + ": missing leaf value");
    }
    return StepFunction(std::move(shared), std::move(values));
  } catch (const json::exception& e) {
    throw FormatError(std::string("function document: ") + e.what());
  }
}

StepFunction load_function(const std::string& path) {
  const auto dir = std::filesystem::path(path).parent_path().string();
  return function_from_json(read_json_file(path), dir.empty() ? "." : dir);
}

void store_function(const StepFunction& phi, const std::string& path) { write_json_file(function_to_json(phi), path); }

}  // namespace mtlab
