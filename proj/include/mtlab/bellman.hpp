#pragma once

#include <cmath>
#include <span>

namespace mtlab {

/// H_p(z) = −(p−1) z^p + p z^{p−1} on [1, p/(p−1)]; decreasing from 1 to 0.
double h_p(double p, double z);

/// Inverse of H_p: the z in [1, p/(p−1)] with H_p(z) = x, for x in [0, 1].
///
/// The root is found in the offset u = z − 1 where 1 − H_p(1+u) can be
/// evaluated without cancellation (H_p is flat at z = 1). Bisection narrows the
/// bracket to 1e−6, then bracketed Newton finishes; at most 200 iterations.
double omega_p(double p, double x);

/// F ω_p(f^p/F)^p, the supremum of ∫(M_T φ)^p under ∫φ = f, ∫φ^p = F.
double bellman_value(double p, double f, double F);

struct BellmanParams {
  double p = 2.0;
  double f = 1.0;
  double F = 1.0;
  double c = 1.0;          // ω_p(f^p/F)
  double beta_star = 0.0;  // c − 1
  double q = 2.0;          // conjugate exponent

  static BellmanParams make(double p, double f, double F);
  double bound() const;
};

/// 1/(β+1−βx)^{p−1} − 1/(β+1)^{p−1} − (p−1)βx/(β+1)^p, nonnegative on [0,1].
double ineq_36_slack(double p, double beta, double x);

/// t^p/p + 1/q − t ≥ 0, zero only at t = 1.
double young_gap(double p, double t);

/// Σ λ_i^p/σ_i^{p−1} − (Σλ_i)^p/(Σσ_i)^{p−1} ≥ 0.
double holder_split_slack(double p, std::span<const double> lambdas, std::span<const double> sigmas);

/// The coefficient (p−1)β/(β+1)^p shared by the sharp inequalities.
inline double maximal_weight(double p, double beta) { return (p - 1.0) * beta / std::pow(beta + 1.0, p); }

}  // namespace mtlab
