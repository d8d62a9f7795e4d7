#pragma once

#include <random>
#include <span>
#include <vector>

#include "mtlab/linearization.hpp"

namespace mtlab {

enum class FamilyKind { maximal, plain };

/// Pairwise disjoint members of S_φ.
struct FamilySelection {
  std::vector<NodeId> members;
  FamilyKind kind = FamilyKind::plain;
};

/// Left side and right side of one inequality lhs ≥ rhs.
struct InequalityTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double slack() const { return lhs - rhs; }
};

/// Per-node diagnostics ρ_I = a_I/μ(I), τ_I = (β+1) − βρ_I over S_φ, and the
/// member values y_{I_j}, μ(I_j).
struct IneqTerms {
  std::vector<double> member_y;
  std::vector<double> member_measure;
  std::vector<NodeId> nodes;
  std::vector<double> rho;
  std::vector<double> tau;
};

/// Throws UsageError unless every member is in S_φ and no two are nested.
void require_disjoint_family(const Linearization& lin, std::span<const NodeId> members);

/// Every I ∈ S_φ meets the union of the members.
bool is_maximal_family(const Linearization& lin, std::span<const NodeId> members);

IneqTerms ineq_terms(const Linearization& lin, std::span<const NodeId> members, double beta);

// Term builders accept β ≥ 0 so the extremal value β* = 0 is representable.
InequalityTerms complement_terms(const StepFunction& phi, const Linearization& lin,
                                 std::span<const NodeId> members, double beta);
InequalityTerms union_terms(const StepFunction& phi, const Linearization& lin,
                            std::span<const NodeId> members, double beta);
InequalityTerms whole_space_terms(const StepFunction& phi, const Linearization& lin, double beta);

/// ∫_{X∖∪I_j} φ^p − [(f^p − Σμ(I_j)y_j^p)/(β+1)^{p−1} + (p−1)β/(β+1)^p ∫_{X∖∪I_j}(Mφ)^p].
/// The family must be maximal; throws UsageError otherwise.
double verify_thm31(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                    double beta);
/// ∫_{∪I_j} φ^p − [Σμ(I_j)y_j^p/(β+1)^{p−1} + (p−1)β/(β+1)^p ∫_{∪I_j}(Mφ)^p].
double verify_thm32(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                    double beta);
/// Same formula as verify_thm31 for any disjoint family.
double verify_cor31(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                    double beta);
/// F − f^p/(β+1)^{p−1} − (p−1)β/(β+1)^p ∫(Mφ)^p.
double verify_310(const StepFunction& phi, const Linearization& lin, double beta);
double verify_310(const StepFunction& phi, double p, double beta);

/// verify_310 at β* = ω_p(f^p/F) − 1.
double gap_at_beta_star(const StepFunction& phi, const Linearization& lin);
double gap_at_beta_star(const StepFunction& phi, double p);

/// Members of S_φ containing no other member.
std::vector<NodeId> minimal_members(const Linearization& lin);

/// Random antichain of S_φ: members visited in shuffled order, each kept with
/// a per-call inclusion probability when disjoint from those already kept.
/// With `complete`, every S_φ-minimal node missing the union is added, which
/// makes the family maximal.
FamilySelection sample_family(const Linearization& lin, std::mt19937_64& rng, bool complete);

/// 25 log-spaced values in [1e−3, 1e3].
std::vector<double> beta_grid();

}  // namespace mtlab
