#include "mtlab/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtlab/error.hpp"
#include "mtlab/numeric.hpp"
#include "mtlab/step_function.hpp"

namespace mtlab {

namespace {

// 1 − H_p(1+u) = (p−1)u(1+e) − e with e = (1+u)^{p−1} − 1.
double one_minus_h(double p, double u) {
  const double e = std::expm1((p - 1.0) * std::log1p(u));
  return (p - 1.0) * u * (1.0 + e) - e;
}

double one_minus_h_derivative(double p, double u) {
  return p * (p - 1.0) * std::pow(1.0 + u, p - 2.0) * u;
}

}  // namespace

double h_p(double p, double z) {
  require_exponent(p);
  const double zmax = p / (p - 1.0);
  if (!(z >= 1.0 - 1e-15 && z <= zmax * (1.0 + 1e-15))) {
    throw DomainError("h_p: z outside [1, p/(p-1)]");
  }
  return -(p - 1.0) * std::pow(z, p) + p * std::pow(z, p - 1.0);
}

double omega_p(double p, double x) {
  require_exponent(p);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("omega_p: x outside [0,1]");
  if (x == 1.0) return 1.0;
  if (x == 0.0) return p / (p - 1.0);

  const double target = 1.0 - x;
  double lo = 0.0;
  double hi = 1.0 / (p - 1.0);
  while (hi - lo > 1e-6) {
    const double mid = 0.5 * (lo + hi);
    (one_minus_h(p, mid) < target ? lo : hi) = mid;
  }
  double u = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = one_minus_h(p, u) - target;
    if (r == 0.0) break;
    (r < 0.0 ? lo : hi) = u;
    const double d = one_minus_h_derivative(p, u);
    double next = d > 0.0 ? u - r / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 2.0 * std::numeric_limits<double>::epsilon() * u && std::abs(r) <= kTauRoot) break;
    if (hi - lo <= std::numeric_limits<double>::min()) break;
  }
  return 1.0 + u;
}

double bellman_value(double p, double f, double F) {
  require_exponent(p);
  if (!(f > 0.0)) throw DomainError("bellman_value: f must be positive");
  const double fp = std::pow(f, p);
  if (!(F > 0.0) || fp > F * (1.0 + kTauNum)) throw DomainError("bellman_value: requires 0 < f^p <= F");
  const double x = std::min(1.0, fp / F);
  return F * std::pow(omega_p(p, x), p);
}

BellmanParams BellmanParams::make(double p, double f, double F) {
  require_exponent(p);
  if (!(f > 0.0)) throw DomainError("BellmanParams: f must be positive");
  const double fp = std::pow(f, p);
  if (!(F > 0.0) || fp > F * (1.0 + kTauNum)) throw DomainError("BellmanParams: requires 0 < f^p <= F");
  BellmanParams b;
  b.p = p;
  b.f = f;
  b.F = F;
  b.c = omega_p(p, std::min(1.0, fp / F));
  b.beta_star = b.c - 1.0;
  b.q = p / (p - 1.0);
  return b;
}

double BellmanParams::bound() const { return F * std::pow(c, p); }

double ineq_36_slack(double p, double beta, double x) {
  require_exponent(p);
  if (!(beta > 0.0)) throw DomainError("ineq_36_slack: beta must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("ineq_36_slack: x outside [0,1]");
  return 1.0 / std::pow(beta + 1.0 - beta * x, p - 1.0) - 1.0 / std::pow(beta + 1.0, p - 1.0) -
         maximal_weight(p, beta) * x;
}

double young_gap(double p, double t) {
  require_exponent(p);
  if (!(t > 0.0)) throw DomainError("young_gap: t must be positive");
  const double q = p / (p - 1.0);
  return std::pow(t, p) / p + 1.0 / q - t;
}

double holder_split_slack(double p, std::span<const double> lambdas, std::span<const double> sigmas) {
  require_exponent(p);
  if (lambdas.size() != sigmas.size()) throw UsageError("holder_split_slack: length mismatch");
  if (lambdas.empty()) throw UsageError("holder_split_slack: empty input");
  CompensatedSum parts;
  CompensatedSum lsum;
  CompensatedSum ssum;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] >= 0.0)) throw DomainError("holder_split_slack: lambda must be >= 0");
    if (!(sigmas[i] > 0.0)) throw DomainError("holder_split_slack: sigma must be > 0");
    parts += std::pow(lambdas[i], p) / std::pow(sigmas[i], p - 1.0);
    lsum += lambdas[i];
    ssum += sigmas[i];
  }
  return parts.value() - std::pow(lsum.value(), p) / std::pow(ssum.value(), p - 1.0);
}

}  // namespace mtlab
