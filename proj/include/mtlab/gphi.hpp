#pragma once

#include <vector>

#include "mtlab/linearization.hpp"

namespace mtlab {

/// Per-element record of the redistribution on A(φ,I).
struct GRecord {
  NodeId node;
  double a = 0.0;      // μ(A(φ,I))
  double c = 0.0;      // common value c_I (p-power mean (∫φ^p/∫φ)^{1/(p−1)})
  double gamma = 0.0;  // measure where g > 0
  int blocks = 0;
  bool stage2_feasible = true;
  std::vector<NodeId> occupied;  // refined leaves where g > 0
};

/// φ rearranged inside every A(φ,I) into at most two values, c_I or 0, with
/// the same integrals over the maximal tree elements inside A(φ,I) and the
/// same p-integral over A(φ,I).
struct GPhi {
  StepFunction phi;
  Linearization lin;
  TreePtr refined;
  StepFunction phi_refined;  // φ on the refined tree
  StepFunction g;
  std::vector<GRecord> records;  // parallel to lin.entries
  std::vector<int> entry_of_slot;  // refined leaf slot → entry index

  bool stage2_feasible() const;
};

GPhi build_g(const StepFunction& phi, double p, const Linearization& lin);
GPhi build_g(const StepFunction& phi, double p);

struct GCheck {
  bool averages = true;  // (a) ∫_I g = ∫_I φ for I containing a member
  bool p_integrals = true;  // (b) per A_I
  bool zero_growth = true;  // (c)
  bool moments = true;      // (d)
  double max_average_dev = 0.0;
  double max_p_dev = 0.0;

  bool all() const { return averages && p_integrals && zero_growth && moments; }
};

GCheck verify_g(const StepFunction& phi, double p, const GPhi& gphi, double tau = kTauNum);

/// c_I on all of A(φ,I), on the refined tree.
StepFunction g_prime(const GPhi& gphi);

struct ResidualSplit {
  double on_delta = 0.0;   // ∫_Δ |Mg − cg|^p, Δ = {Mg > cg}
  double off_delta = 0.0;  // ∫_{X∖Δ} |Mg − cg|^p
  double total() const { return on_delta + off_delta; }
};

ResidualSplit residual_split(const GPhi& gphi, double p, double c);
/// c = ω_p(f^p/F) from φ's moments.
ResidualSplit residual_split(const GPhi& gphi, double p);

struct YoungDiagnostics {
  double t_phi = 0.0;  // (∫_{g′≤φ} φ^p)^{1/p}
  double s_phi = 0.0;  // (∫_{g′≤φ} g′^p)^{1/p}
  double cross = 0.0;  // ∫_{g′≤φ} φ g′^{p−1}
  double gap_340 = 0.0;     // t^p/p + s^p/q − cross, ≥ 0 by Young
  double holder_gap = 0.0;  // t s^{p−1} − cross, ≥ 0 by Hölder
};

YoungDiagnostics young_diagnostics(const StepFunction& phi, double p, const GPhi& gphi);

/// μ{g = 0} on the refined tree.
double zero_measure(const StepFunction& g);

/// Σ_I γ_I P_I with P_I = ∫_{A_I} φ^p / a_I. Diagnostic only.
double sigma_phi(const GPhi& gphi);

}  // namespace mtlab
