#pragma once

#include <string>

#include "json.hpp"
#include "mtlab/step_function.hpp"

namespace mtlab {

inline constexpr int kFileFormatVersion = 1;

/// {"format":"mtlab-tree","version":1,"root":id,"nodes":[{"id","parent","measure"}]}
nlohmann::json tree_to_json(const MeasureTree& tree);
MeasureTree tree_from_json(const nlohmann::json& doc);

/// {"format":"mtlab-function","version":1,"tree":<path or inline tree>,
///  "leaf_values":[{"leaf_id","value"}]}. Tree paths are resolved relative to
/// the function file's directory.
nlohmann::json function_to_json(const StepFunction& phi, const std::string& tree_path = {});
StepFunction function_from_json(const nlohmann::json& doc, const std::string& base_dir = ".");

StepFunction load_function(const std::string& path);
void store_function(const StepFunction& phi, const std::string& path);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const nlohmann::json& doc, const std::string& path);

}  // namespace mtlab
