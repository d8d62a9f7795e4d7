#include <random>

#include "doctest.h"
#include "mtlab/corpus.hpp"
#include "mtlab/error.hpp"
#include "mtlab/step_function.hpp"
#include "oracles.hpp"

using namespace mtlab;

TEST_SUITE("stepfn") {
  TEST_CASE("averages on the (4,0,0,0) example") {
    const TreePtr t = share(build_uniform(2, 2));
    const StepFunction phi(t, {4, 0, 0, 0});
    const NodeId left = t->children(t->root())[0];
    CHECK(phi.average(left) == 2.0);
    CHECK(phi.average(t->root()) == 1.0);
    for (std::size_t s = 0; s < 4; ++s) CHECK(phi.average(t->leaf_at(s)) == phi.value(s));
    CHECK(p_integral(phi, 2.0) == 4.0);
    const Moments m = moments(phi, 2.0);
    CHECK(m.f == 1.0);
    CHECK(m.F == 4.0);
  }

  TEST_CASE("constant functions") {
    const TreePtr t = share(build_uniform(3, 2));
    const auto phi = StepFunction::constant(t, 2.5);
    for (NodeId id : t->preorder()) CHECK(phi.average(id) == doctest::Approx(2.5).epsilon(1e-15));
    const Moments m = moments(phi, 3.0);
    CHECK(m.f == doctest::Approx(2.5));
    CHECK(m.F == doctest::Approx(std::pow(2.5, 3.0)));
    CHECK(p_integral(StepFunction::constant(t, 1.0), 2.0) == doctest::Approx(1.0).epsilon(1e-15));
  }

  TEST_CASE("p_integral over a slot set") {
    const TreePtr t = share(build_uniform(2, 2));
    const StepFunction phi(t, {4, 0, 0, 0});
    CHECK(p_integral(phi, 2.0, std::vector<std::size_t>{}) == 0.0);
    CHECK(p_integral(phi, 2.0, std::vector<std::size_t>{0, 1}) == 4.0);
  }

  TEST_CASE("lp_distance") {
    const TreePtr t = share(build_uniform(2, 2));
    const StepFunction phi(t, {4, 0, 0, 0});
    CHECK(lp_distance(phi, phi, 2.0) == 0.0);
    CHECK(lp_distance(StepFunction::constant(t, 2.0), StepFunction::constant(t, 1.0), 2.0) == 1.0);
    CHECK(lp_distance(phi, StepFunction::constant(t, 0.0), 2.0) == 4.0);
    const TreePtr other = share(build_uniform(2, 3));
    CHECK_THROWS_AS(lp_distance(phi, StepFunction::constant(other, 1.0), 2.0), UsageError);
  }

  TEST_CASE("invalid values and exponents") {
    const TreePtr t = share(build_uniform(2, 1));
    CHECK_THROWS_AS(StepFunction(t, {1.0, -1.0}), DomainError);
    CHECK_THROWS_AS(StepFunction(t, {1.0, std::nan("")}), DomainError);
    CHECK_THROWS_AS(StepFunction(t, {1.0}), UsageError);
    CHECK_THROWS_AS(moments(StepFunction::constant(t, 0.0), 2.0), DomainError);
    CHECK_THROWS_AS(moments(StepFunction::constant(t, 1.0), 1.0), DomainError);
    CHECK_THROWS_AS(moments(StepFunction::constant(t, 1.0), 65.0), DomainError);
  }

  TEST_CASE("additivity, refinement invariance and Jensen on random functions") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      const TreePtr t = share(random_tree(rng));
      const auto phi = random_function(rng, t);
      for (NodeId id : t->preorder()) {
        CHECK(phi.integral(id) == doctest::Approx(oracle::integral(phi, id)).epsilon(1e-12));
        if (t->is_leaf(id)) continue;
        double s = 0.0;
        for (NodeId c : t->children(id)) s += phi.average(c) * t->measure(c);
        CHECK(std::abs(s - phi.average(id) * t->measure(id)) <= kTauNum * std::max(1.0, phi.integral(id)));
      }
      const double p = 1.0 + std::uniform_real_distribution<double>(0.1, 3.0)(rng);
      const Moments m = moments(phi, p);
      CHECK(m.F >= std::pow(m.f, p) * (1.0 - kTauNum));

      const double frac[] = {0.3, 0.7};
      const TreePtr r = share(refine_leaf(*t, t->leaf_at(0), frac));
      const Moments mr = moments(phi.lift_to(r), p);
      CHECK(mr.f == doctest::Approx(m.f).epsilon(1e-12));
      CHECK(mr.F == doctest::Approx(m.F).epsilon(1e-12));
    }
  }
}
