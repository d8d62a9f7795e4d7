#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mtlab/corpus.hpp"
#include "mtlab/error.hpp"
#include "mtlab/io.hpp"
#include "mtlab/measure_tree.hpp"

using namespace mtlab;

namespace {

void check_child_sums(const MeasureTree& t) {
  for (NodeId id : t.preorder()) {
    if (t.is_leaf(id)) continue;
    double s = 0.0;
    for (NodeId c : t.children(id)) s += t.measure(c);
    CHECK(std::abs(s - t.measure(id)) <= kTauMeas * t.measure(id));
    CHECK(t.children(id).size() >= 2);
  }
}

bool pairwise_disjoint(const MeasureTree& t, const std::vector<NodeId>& nodes) {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (!t.disjoint(nodes[i], nodes[j])) return false;
    }
  }
  return true;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("mtlab_test_" + name)).string();
}

}  // namespace

TEST_SUITE("measure_tree") {
  TEST_CASE("uniform trees have the forced shape") {
    const auto t21 = build_uniform(2, 1);
    CHECK(t21.size() == 3);
    CHECK(t21.leaf_count() == 2);
    for (NodeId l : t21.leaves()) CHECK(t21.measure(l) == 0.5);

    const auto t23 = build_uniform(2, 3);
    CHECK(t23.size() == 15);
    CHECK(t23.leaf_count() == 8);
    for (NodeId l : t23.leaves()) CHECK(t23.measure(l) == doctest::Approx(0.125).epsilon(1e-15));

    const auto t32 = build_uniform(3, 2);
    CHECK(t32.size() == 13);
    CHECK(t32.leaf_count() == 9);
    for (NodeId l : t32.leaves()) CHECK(t32.measure(l) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  }

  TEST_CASE("uniform node count and depth measures") {
    for (int m = 2; m <= 4; ++m) {
      for (int d = 1; d <= 5; ++d) {
        const auto t = build_uniform(m, d);
        std::size_t expect = 0;
        std::size_t level = 1;
        for (int k = 0; k <= d; ++k, level *= static_cast<std::size_t>(m)) expect += level;
        CHECK(t.size() == expect);
        for (NodeId id : t.preorder()) {
          CHECK(t.measure(id) == doctest::Approx(std::pow(m, -t.depth(id))).epsilon(1e-14));
        }
        check_child_sums(t);
      }
    }
  }

  TEST_CASE("uniform builder rejects bad shapes") {
    CHECK_THROWS_AS(build_uniform(1, 3), DomainError);
    CHECK_THROWS_AS(build_uniform(2, 0), DomainError);
    CHECK_THROWS_AS(build_uniform(2, 40), CapacityError);
  }

  TEST_CASE("nested chains") {
    const std::vector<double> one{0.5};
    const auto c1 = build_nested_chain(one, 2);
    CHECK(c1.tree.measure(c1.chain[1]) == 0.5);
    CHECK(c1.tree.measure(c1.rings[0]) == 0.5);
    CHECK(c1.tree.children(c1.rings[0]).size() == 2);
    for (NodeId k : c1.tree.children(c1.rings[0])) CHECK(c1.tree.measure(k) == 0.25);

    const std::vector<double> two{0.5, 0.5};
    const auto c2 = build_nested_chain(two, 2);
    const auto pm = c2.piece_measures();
    REQUIRE(pm.size() == 3);
    CHECK(pm[0] == 0.5);
    CHECK(pm[1] == 0.25);
    CHECK(pm[2] == 0.25);

    const std::vector<double> thirty{0.3, 0.3};
    const auto c3 = build_nested_chain(thirty, 2);
    const auto p3 = c3.piece_measures();
    CHECK(p3[0] == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(p3[1] == doctest::Approx(0.21).epsilon(1e-15));
    CHECK(p3[2] == doctest::Approx(0.09).epsilon(1e-15));
    check_child_sums(c3.tree);

    const std::vector<double> bad{0.5, 1.0};
    CHECK_THROWS_AS(build_nested_chain(bad, 2), DomainError);
    CHECK_THROWS_AS(build_nested_chain(std::vector<double>{}, 2), DomainError);
  }

  TEST_CASE("ring leaves map to their ring") {
    const std::vector<double> r(5, 0.75);
    const auto c = build_nested_chain(r, 2);
    for (std::size_t s = 0; s < c.tree.leaf_count(); ++s) {
      const int k = c.ring_of_leaf[s];
      const NodeId piece = k < c.ring_count() ? c.rings[static_cast<std::size_t>(k)] : c.chain.back();
      CHECK(c.tree.contains(piece, c.tree.leaf_at(s)));
    }
    CHECK(c.tree.is_leaf(c.chain.back()));
  }

  TEST_CASE("max leaf measure shrinks along each builder family") {
    double prev = 2.0;
    for (int d = 1; d <= 8; ++d) {
      const double m = build_uniform(2, d).max_leaf_measure();
      CHECK(m < prev);
      prev = m;
    }
    prev = 2.0;
    for (int K = 1; K <= 10; ++K) {
      const std::vector<double> r(static_cast<std::size_t>(K), 0.75);
      const double m = build_nested_chain(r, 2).tree.max_leaf_measure();
      CHECK(m < prev);
      prev = m;
    }
  }

  TEST_CASE("refine_leaf") {
    const auto t = build_uniform(2, 1);
    const NodeId leaf = t.leaf_at(0);
    const double half[] = {0.5, 0.5};
    const auto r = refine_leaf(t, leaf, half);
    CHECK(r.leaf_count() == 3);
    for (NodeId c : r.children(leaf)) CHECK(r.measure(c) == 0.25);
    for (std::size_t i = 0; i < t.size(); ++i) {
      CHECK(r.measure(NodeId(static_cast<std::uint32_t>(i))) == t.measure(NodeId(static_cast<std::uint32_t>(i))));
    }

    const auto t3 = build_uniform(2, 3);
    const double sixty[] = {0.6, 0.4};
    const auto r3 = refine_leaf(t3, t3.leaf_at(0), sixty);
    const auto kids = r3.children(t3.leaf_at(0));
    CHECK(r3.measure(kids[0]) == doctest::Approx(0.075).epsilon(1e-15));
    CHECK(r3.measure(kids[1]) == doctest::Approx(0.05).epsilon(1e-15));

    const double three[] = {0.3, 0.3, 0.4};
    CHECK(refine_leaf(t, leaf, three).children(leaf).size() == 3);

    CHECK_THROWS_AS(refine_leaf(t, t.root(), half), UsageError);
    const double off[] = {0.5, 0.4};
    CHECK_THROWS_AS(refine_leaf(t, leaf, off), UsageError);
  }

  TEST_CASE("select_subfamily hits the target measure") {
    const auto t = build_uniform(2, 3);
    const auto exact = select_subfamily(t, t.root(), 0.25);
    CHECK(exact.members.size() == 6);
    CHECK(exact.total_measure == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(exact.tree.size() == t.size());

    const auto split = select_subfamily(t, t.root(), 0.3);
    REQUIRE(split.members.size() == 6);
    CHECK(split.total_measure == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(split.tree.measure(split.members.back()) == doctest::Approx(0.075).epsilon(1e-12));
    CHECK(pairwise_disjoint(split.tree, split.members));

    const auto tiny = select_subfamily(t, t.root(), 0.99);
    REQUIRE(tiny.members.size() == 1);
    CHECK(tiny.total_measure == doctest::Approx(0.01).epsilon(1e-12));
  }

  TEST_CASE("select_subfamily property on random trees") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(0.01, 0.99);
    for (int i = 0; i < 200; ++i) {
      const auto t = random_tree(rng);
      const NodeId node = t.preorder()[std::uniform_int_distribution<std::size_t>(0, t.size() - 1)(rng)];
      const double a = ua(rng);
      const auto sub = select_subfamily(t, node, a);
      CHECK(std::abs(sub.total_measure - (1.0 - a) * t.measure(node)) <= 1e-12 * t.measure(node));
      CHECK(pairwise_disjoint(sub.tree, sub.members));
      for (NodeId m : sub.members) CHECK(sub.tree.strictly_contains(node, m));
      for (std::size_t k = 0; k < t.size(); ++k) {
        const NodeId id(static_cast<std::uint32_t>(k));
        CHECK(sub.tree.measure(id) == t.measure(id));
      }
      sub.tree.validate();
    }
  }

  TEST_CASE("containment is set inclusion") {
    const auto t = build_uniform(3, 3);
    for (NodeId a : t.preorder()) {
      for (NodeId b : t.preorder()) {
        bool anc = false;
        for (std::optional<NodeId> up = b; up; up = t.parent(*up)) anc = anc || *up == a;
        CHECK(t.contains(a, b) == anc);
      }
    }
  }

  TEST_CASE("tree files round-trip and reject invariant violations") {
    const auto t = build_uniform(2, 2);
    const auto path = temp_path("tree.json");
    store_tree(t, path);
    CHECK(load_tree(path).same_structure(t));

    nlohmann::json doc = tree_to_json(t);
    doc["nodes"][t.children(t.root())[0].index()]["measure"] = 0.4;  // root children sum to 0.9
    try {
      (void)tree_from_json(doc);
      FAIL("accepted a bad measure sum");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("node") != std::string::npos);
    }

    nlohmann::json single = {{"format", "mtlab-tree"},
                             {"version", 1},
                             {"root", 0},
                             {"nodes",
                              {{{"id", 0}, {"parent", nullptr}, {"measure", 1.0}},
                               {{"id", 1}, {"parent", 0}, {"measure", 1.0}}}}};
    CHECK_THROWS_AS(tree_from_json(single), FormatError);

    std::ofstream(temp_path("garbage.json")) << "{not json";
    CHECK_THROWS(load_tree(temp_path("garbage.json")));
  }

  TEST_CASE("split_leaves applies a batch") {
    auto t = build_uniform(2, 2);
    const std::vector<MeasureTree::LeafSplit> batch{{t.leaf_at(0), {0.25, 0.75}}, {t.leaf_at(3), {0.5, 0.5}}};
    const NodeId l0 = t.leaf_at(0);
    const auto kids = t.split_leaves(batch);
    CHECK(kids.size() == 2);
    CHECK(t.leaf_count() == 6);
    CHECK(t.measure(kids[0][0]) == doctest::Approx(0.0625));
    CHECK(t.parent(kids[0][0]) == l0);
    t.validate();
  }
}
