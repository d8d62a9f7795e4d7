#include <algorithm>
#include <vector>

#include "doctest.h"
#include "mtlab/bellman.hpp"
#include "mtlab/error.hpp"
#include "mtlab/numeric.hpp"
#include "oracles.hpp"

using namespace mtlab;

TEST_SUITE("bellman_fn") {
  TEST_CASE("h_p values") {
    for (double p : {1.1, 1.5, 2.0, 3.0, 10.0}) {
      CHECK(h_p(p, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
      CHECK(std::abs(h_p(p, p / (p - 1.0))) <= 1e-12);
    }
    CHECK(h_p(2.0, 1.5) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(h_p(2.0, 0.9), DomainError);
    CHECK_THROWS_AS(h_p(2.0, 2.1), DomainError);
  }

  TEST_CASE("h_p is strictly decreasing") {
    for (double p : {1.2, 1.5, 2.0, 3.0, 7.0}) {
      const double hi = p / (p - 1.0);
      double prev = 2.0;
      for (int i = 0; i <= 200; ++i) {
        const double z = 1.0 + (hi - 1.0) * i / 200.0;
        const double h = h_p(p, z);
        CHECK(h < prev);
        prev = h;
      }
    }
  }

  TEST_CASE("omega_p examples and errors") {
    for (double p : {1.5, 2.0, 3.0}) {
      CHECK(omega_p(p, 1.0) == 1.0);
      CHECK(omega_p(p, 0.0) == doctest::Approx(p / (p - 1.0)).epsilon(1e-14));
    }
    CHECK(omega_p(2.0, 0.75) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(omega_p(2.0, 0.25) == doctest::Approx(1.0 + std::sqrt(0.75)).epsilon(1e-14));
    CHECK_THROWS_AS(omega_p(2.0, -0.1), DomainError);
    CHECK_THROWS_AS(omega_p(2.0, 1.1), DomainError);
    CHECK_THROWS_AS(omega_p(1.0, 0.5), DomainError);
  }

  TEST_CASE("omega_p inverts h_p and matches the bisection oracle") {
    for (double p : {1.05, 1.5, 2.0, 2.5, 3.0, 8.0, 64.0}) {
      const double hi = p / (p - 1.0);
      for (int i = 0; i <= 50; ++i) {
        const double z = 1.0 + (hi - 1.0) * i / 50.0;
        const double x = std::clamp(h_p(p, z), 0.0, 1.0);
        CHECK(std::abs(h_p(p, omega_p(p, x)) - x) <= kTauRoot);
        if (x > 1e-6 && x < 1.0 - 1e-6) CHECK(omega_p(p, x) == doctest::Approx(z).epsilon(1e-9));
      }
      for (int i = 0; i <= 20; ++i) {
        const double x = i / 20.0;
        CHECK(omega_p(p, x) == doctest::Approx(oracle::omega(p, x)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("bellman_value") {
    CHECK(bellman_value(2.0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(bellman_value(2.0, 1.0, 4.0 / 3.0) == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(bellman_value(2.0, 1.0, 4.0) == doctest::Approx(13.928203230275509).epsilon(1e-12));
    CHECK_THROWS_AS(bellman_value(2.0, 2.0, 1.0), DomainError);
    for (double p : {1.5, 2.0, 3.0}) {
      for (double f : {0.3, 1.0, 2.0}) {
        CHECK(bellman_value(p, f, std::pow(f, p)) == doctest::Approx(std::pow(f, p)).epsilon(1e-13));
        const double F = 2.5 * std::pow(f, p);
        for (double t : {0.5, 2.0}) {
          CHECK(bellman_value(p, t * f, std::pow(t, p) * F) ==
                doctest::Approx(std::pow(t, p) * bellman_value(p, f, F)).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("BellmanParams") {
    const auto bp = BellmanParams::make(2.0, 1.0, 4.0 / 3.0);
    CHECK(bp.c == doctest::Approx(1.5));
    CHECK(bp.beta_star == doctest::Approx(0.5));
    CHECK(bp.q == doctest::Approx(2.0));
    CHECK(bp.bound() == doctest::Approx(3.0));
    CHECK(BellmanParams::make(3.0, 1.0, 1.0).beta_star == 0.0);
    const auto b3 = BellmanParams::make(3.0, 1.0, 2.0);
    CHECK(b3.q == doctest::Approx(1.5));
    CHECK(std::abs(h_p(3.0, b3.c) - 0.5) <= kTauRoot);
  }

  TEST_CASE("scalar inequality slack") {
    CHECK(ineq_36_slack(2.0, 1.0, 0.0) == 0.0);
    CHECK(ineq_36_slack(2.0, 1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-15));
    for (double p : {1.5, 2.0, 3.0}) {
      for (double beta : {0.1, 1.0, 10.0}) {
        CHECK(ineq_36_slack(p, beta, 0.0) == 0.0);
        for (int i = 1; i <= 100; ++i) CHECK(ineq_36_slack(p, beta, i / 100.0) > 0.0);
      }
    }
  }

  TEST_CASE("young_gap") {
    CHECK(young_gap(2.0, 1.0) == 0.0);
    CHECK(young_gap(2.0, 2.0) == doctest::Approx(0.5));
    CHECK(young_gap(2.0, 0.5) == doctest::Approx(0.125));
    for (double p : {1.5, 3.0}) {
      CHECK(std::abs(young_gap(p, 1.0)) <= 1e-15);
      for (double t : {0.01, 0.5, 0.99, 1.01, 2.0, 50.0}) CHECK(young_gap(p, t) > 0.0);
    }
  }

  TEST_CASE("holder_split_slack") {
    const std::vector<double> one_l{3.0}, one_s{0.4};
    CHECK(holder_split_slack(2.0, one_l, one_s) == 0.0);
    const std::vector<double> l11{1, 1}, s11{1, 1}, l21{2, 1};
    CHECK(std::abs(holder_split_slack(2.0, l11, s11)) <= 1e-15);
    CHECK(holder_split_slack(2.0, l21, s11) == doctest::Approx(0.5));
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(holder_split_slack(2.0, l11, three), UsageError);
  }
}
