#include <random>

#include "doctest.h"
#include "mtlab/bellman.hpp"
#include "mtlab/corpus.hpp"
#include "mtlab/maximal.hpp"
#include "oracles.hpp"

using namespace mtlab;

namespace {

StepFunction example() { return StepFunction(share(build_uniform(2, 2)), {4, 0, 0, 0}); }

}  // namespace

TEST_SUITE("maximal_op") {
  TEST_CASE("maximal function on (4,0,0,0)") {
    const auto phi = example();
    const auto m = maximal_function(phi);
    const std::vector<double> expect{4, 2, 1, 1};
    for (std::size_t s = 0; s < 4; ++s) CHECK(m.mphi.value(s) == expect[s]);
    const auto& t = phi.tree();
    const NodeId left = t.children(t.root())[0];
    CHECK(m.argmax[0] == t.leaf_at(0));
    CHECK(m.argmax[1] == left);
    CHECK(m.argmax[2] == t.root());
    CHECK(m.argmax[3] == t.root());
  }

  TEST_CASE("ties go to the largest node") {
    const auto t = share(build_uniform(2, 3));
    const auto m = maximal_function(StepFunction::constant(t, 3.0));
    for (std::size_t s = 0; s < t->leaf_count(); ++s) {
      CHECK(m.argmax[s] == t->root());
      CHECK(m.mphi.value(s) == doctest::Approx(3.0).epsilon(1e-15));
    }
    // Left half (2,2) averages 2, same as its first leaf: the left node wins.
    const StepFunction phi(share(build_uniform(2, 2)), {2, 2, 0, 0});
    const auto mm = maximal_function(phi);
    CHECK(mm.argmax[0] == phi.tree().children(phi.tree().root())[0]);
  }

  TEST_CASE("weak-type slack examples") {
    const auto phi = example();
    CHECK(check_weak_type(phi, 1.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(check_weak_type(phi, 10.0) == 0.0);
    const auto c = StepFunction::constant(phi.tree_ptr(), 2.0);
    CHECK(check_weak_type(c, 0.5) == doctest::Approx(1.5).epsilon(1e-15));
  }

  TEST_CASE("Lp and Bellman slack examples") {
    const auto phi = example();
    CHECK(check_lp_bound(phi, 2.0) == doctest::Approx(10.5).epsilon(1e-14));
    CHECK(check_lp_bound(StepFunction::constant(phi.tree_ptr(), 1.0), 2.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(check_bellman_bound(phi, 2.0) == doctest::Approx(4.0 * std::pow(1.0 + std::sqrt(0.75), 2) - 5.5).epsilon(1e-12));
    CHECK(std::abs(check_bellman_bound(StepFunction::constant(phi.tree_ptr(), 1.7), 2.0)) <= 1e-12);
  }

  TEST_CASE("weak-type levels include every value and its neighbours") {
    const auto phi = example();
    const auto levels = weak_type_levels(maximal_function(phi));
    for (double v : {1.0, 2.0, 4.0}) {
      CHECK(std::find(levels.begin(), levels.end(), v) != levels.end());
    }
    CHECK(levels.size() == 9);
  }

  TEST_CASE("oracle agreement and operator properties on random functions") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
      const TreePtr t = share(random_tree(rng));
      const auto phi = random_function(rng, t);
      const auto m = maximal_function(phi);
      const double f = phi.integral();
      for (std::size_t s = 0; s < t->leaf_count(); ++s) {
        const auto ref = oracle::maximal_at(phi, t->leaf_at(s), 1e-11);
        CHECK(m.mphi.value(s) == doctest::Approx(ref.value).epsilon(1e-11));
        CHECK(m.argmax[s] == ref.argmax);
        CHECK(m.mphi.value(s) >= phi.value(s) * (1 - 1e-12));
        CHECK(m.mphi.value(s) >= f * (1 - 1e-12));
      }
      const double tscale = 3.7;
      const auto ms = maximal_function(phi.scaled(tscale));
      for (std::size_t s = 0; s < t->leaf_count(); ++s) {
        CHECK(ms.mphi.value(s) == doctest::Approx(tscale * m.mphi.value(s)).epsilon(1e-12));
      }
      std::vector<double> bigger(phi.values().begin(), phi.values().end());
      for (double& v : bigger) v += std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      const auto mb = maximal_function(StepFunction(t, bigger));
      for (std::size_t s = 0; s < t->leaf_count(); ++s) CHECK(mb.mphi.value(s) >= m.mphi.value(s) * (1 - 1e-12));

      for (double lambda : weak_type_levels(m)) CHECK(check_weak_type(phi, m, lambda) >= -kTauNum * std::max(1.0, f));
      for (double p : {1.5, 2.0, 3.0}) {
        const double F = p_integral(phi, p);
        const double lp = check_lp_bound(phi, m, p);
        const double bb = check_bellman_bound(phi, m, p);
        CHECK(bb >= -kTauNum * std::max(1.0, F));
        CHECK(lp >= bb - kTauNum * std::max(1.0, F));
        CHECK(bellman_value(p, f, F) - bb == doctest::Approx(oracle::maximal_p_integral(phi, p)).epsilon(1e-10));
      }
    }
  }
}
