#include <random>

#include "doctest.h"
#include "mtlab/corpus.hpp"
#include "mtlab/linearization.hpp"
#include "oracles.hpp"

using namespace mtlab;

TEST_SUITE("linearization") {
  TEST_CASE("(4,0,0,0) on uniform(2,2)") {
    const StepFunction phi(share(build_uniform(2, 2)), {4, 0, 0, 0});
    const auto lin = linearize(phi, 2.0);
    const auto& t = phi.tree();
    const NodeId root = t.root();
    const NodeId left = t.children(root)[0];
    const NodeId leaf1 = t.leaf_at(0);
    REQUIRE(lin.entries.size() == 3);
    CHECK(lin.entries[0].node == root);
    CHECK(lin.contains(left));
    CHECK(lin.contains(leaf1));
    CHECK_FALSE(lin.contains(t.leaf_at(1)));
    CHECK_FALSE(lin.contains(t.children(root)[1]));

    CHECK(lin.at(root).a == 0.5);
    CHECK(lin.at(root).y == 1.0);
    CHECK(lin.at(root).leaves == std::vector<std::size_t>{2, 3});
    CHECK(lin.at(left).a == 0.25);
    CHECK(lin.at(left).y == 2.0);
    CHECK(lin.at(leaf1).a == 0.25);
    CHECK(lin.at(leaf1).y == 4.0);
    CHECK(lin.at(leaf1).x == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lin.at(leaf1).star == left);
    CHECK(lin.at(left).star == root);
    CHECK_FALSE(lin.at(root).star.has_value());

    CHECK(verify_lemma31(phi, lin));
    const auto rep = verify_lemma32(phi, lin);
    CHECK(rep.all());
    CHECK(rep.leaf_members == std::vector<NodeId>{leaf1});

    const auto rec = reconstruct_maximal(lin);
    const std::vector<double> expect{4, 2, 1, 1};
    for (std::size_t s = 0; s < 4; ++s) CHECK(rec.value(s) == expect[s]);
    CHECK(lin.weighted_power_sum() == doctest::Approx(5.5).epsilon(1e-15));
  }

  TEST_CASE("constant functions linearize to the root") {
    const auto t = share(build_uniform(3, 3));
    const auto phi = StepFunction::constant(t, 0.7);
    const auto lin = linearize(phi, 3.0);
    REQUIRE(lin.entries.size() == 1);
    CHECK(lin.entries[0].a == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lin.entries[0].y == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(lin.entries[0].leaves.size() == t->leaf_count());
    CHECK(verify_lemma31(phi, lin));
    CHECK(verify_lemma32(phi, lin).all());
    const auto rec = reconstruct_maximal(lin);
    for (std::size_t s = 0; s < t->leaf_count(); ++s) CHECK(rec.value(s) == doctest::Approx(0.7).epsilon(1e-14));
  }

  TEST_CASE("structural properties on random functions") {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 300; ++i) {
      const TreePtr t = share(i % 3 == 0 ? build_uniform(2, 5) : random_tree(rng, CorpusShape{6, 3, 0.65}));
      const auto phi = random_function(rng, t);
      const double p = std::array{1.5, 2.0, 3.0}[static_cast<std::size_t>(i % 3)];
      const auto m = maximal_function(phi);
      const auto lin = linearize(phi, m, p);

      CHECK(verify_lemma31(phi, lin));
      CHECK(verify_lemma32(phi, lin).all());

      // Membership against the definition: some leaf picks the node as argmax.
      for (NodeId id : t->preorder()) {
        bool picked = id == t->root();
        for (std::size_t s = 0; s < t->leaf_count(); ++s) {
          picked = picked || oracle::maximal_at(phi, t->leaf_at(s), 1e-12).argmax == id;
        }
        CHECK(lin.contains(id) == picked);
      }

      double total_a = 0.0;
      std::vector<int> seen(t->leaf_count(), 0);
      for (const auto& e : lin.entries) {
        total_a += e.a;
        for (std::size_t s : e.leaves) ++seen[s];
        if (e.a > 0) {
          CHECK(e.x == doctest::Approx(std::pow(e.a, -1.0 + 1.0 / p) * e.mass).epsilon(1e-12));
        }
        if (e.star) {
          CHECK(lin.contains(*e.star));
          CHECK(t->strictly_contains(*e.star, e.node));
          CHECK(lin.at(*e.star).y < e.y);
          // No member sits strictly between I and I*.
          for (const auto& o : lin.entries) {
            CHECK_FALSE((t->strictly_contains(*e.star, o.node) && t->strictly_contains(o.node, e.node)));
          }
          // Iterating star reaches the root.
          std::optional<NodeId> up = e.star;
          int steps = 0;
          while (up && *up != t->root() && steps < 1000) {
            up = lin.at(*up).star;
            ++steps;
          }
          CHECK(up == t->root());
        }
      }
      CHECK(total_a == doctest::Approx(1.0).epsilon(1e-12));
      for (int c : seen) CHECK(c == 1);

      const auto rec = reconstruct_maximal(lin);
      for (std::size_t s = 0; s < t->leaf_count(); ++s) CHECK(rec.value(s) == m.mphi.value(s));
      CHECK(lin.weighted_power_sum() == doctest::Approx(oracle::maximal_p_integral(phi, p)).epsilon(1e-10));
    }
  }

  TEST_CASE("membership and measure checks reject a tampered linearization") {
    const StepFunction phi(share(build_uniform(2, 2)), {4, 0, 0, 0});
    auto lin = linearize(phi, 2.0);
    lin.entries[1].a = 0.3;
    CHECK_FALSE(verify_lemma32(phi, lin).measure_identity);

    auto lin2 = linearize(phi, 2.0);
    const NodeId right = phi.tree().children(phi.tree().root())[1];
    lin2.entry_of_node[right.index()] = 0;
    CHECK_FALSE(verify_lemma31(phi, lin2));
  }
}
