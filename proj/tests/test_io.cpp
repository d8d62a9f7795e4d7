#include <filesystem>
#include <random>

#include "doctest.h"
#include "mtlab/corpus.hpp"
#include "mtlab/error.hpp"
#include "mtlab/io.hpp"

using namespace mtlab;
namespace fs = std::filesystem;

TEST_SUITE("io") {
  TEST_CASE("function files round-trip with inline and external trees") {
    std::mt19937_64 rng(3);
    const fs::path dir = fs::temp_directory_path() / "mtlab_io_test";
    fs::create_directories(dir / "sub");
    for (int i = 0; i < 20; ++i) {
      const TreePtr t = share(random_tree(rng));
      const auto phi = random_function(rng, t);

      store_function(phi, (dir / "inline.json").string());
      const auto back = load_function((dir / "inline.json").string());
      CHECK(back.tree().same_structure(*t));
      CHECK(std::equal(back.values().begin(), back.values().end(), phi.values().begin()));

      store_tree(*t, (dir / "sub" / "tree.json").string());
      write_json_file(function_to_json(phi, "tree.json"), (dir / "sub" / "fn.json").string());
      const auto ext = load_function((dir / "sub" / "fn.json").string());
      CHECK(ext.tree().same_structure(*t));
      CHECK(std::equal(ext.values().begin(), ext.values().end(), phi.values().begin()));
    }
  }

  TEST_CASE("function documents with bad leaf values are rejected") {
    const auto t = share(build_uniform(2, 1));
    const StepFunction phi(t, {1.0, 2.0});
    auto doc = function_to_json(phi);
    doc["leaf_values"][0]["value"] = -1.0;
    CHECK_THROWS_AS(function_from_json(doc), FormatError);

    doc = function_to_json(phi);
    doc["leaf_values"][0]["leaf_id"] = 0;  // root is not a leaf
    CHECK_THROWS_AS(function_from_json(doc), FormatError);

    doc = function_to_json(phi);
    doc["leaf_values"].erase(1);
    CHECK_THROWS_AS(function_from_json(doc), FormatError);

    CHECK_THROWS_AS(load_function("/nonexistent/mtlab/fn.json"), FormatError);
  }

  TEST_CASE("tree documents: duplicate ids and two roots") {
    nlohmann::json dup = tree_to_json(build_uniform(2, 1));
    dup["nodes"][2]["id"] = 1;
    CHECK_THROWS_AS(tree_from_json(dup), FormatError);

    nlohmann::json two = tree_to_json(build_uniform(2, 1));
    two["nodes"][2]["parent"] = nullptr;
    CHECK_THROWS_AS(tree_from_json(two), FormatError);
  }
}
