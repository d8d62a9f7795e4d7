#pragma once

#include <vector>

#include "mtlab/step_function.hpp"

namespace mtlab {

/// M_T φ on the leaves together with, per leaf, the largest ancestor-or-self
/// attaining the supremum.
struct MaximalResult {
  StepFunction mphi;
  std::vector<NodeId> argmax;  // indexed by leaf slot
};

/// Single root-to-leaf pass. A node takes over the running maximum only if its
/// average exceeds every average above it by more than the tie tolerance, so
/// ties resolve toward the largest node.
MaximalResult maximal_function(const StepFunction& phi);

/// ∫_{Mφ>λ} φ − λ μ(Mφ>λ). Nonnegative by the weak-type inequality.
double check_weak_type(const StepFunction& phi, const MaximalResult& m, double lambda);
double check_weak_type(const StepFunction& phi, double lambda);

/// Distinct values of Mφ, each also shifted by ±eps relative.
std::vector<double> weak_type_levels(const MaximalResult& m, double eps = 1e-9);

/// (p/(p−1))^p F − ∫(Mφ)^p.
double check_lp_bound(const StepFunction& phi, const MaximalResult& m, double p);
double check_lp_bound(const StepFunction& phi, double p);

/// F ω_p(f^p/F)^p − ∫(Mφ)^p.
double check_bellman_bound(const StepFunction& phi, const MaximalResult& m, double p);
double check_bellman_bound(const StepFunction& phi, double p);

}  // namespace mtlab
