#pragma once

#include <optional>
#include <vector>

#include "mtlab/maximal.hpp"

namespace mtlab {

/// One element I of S_φ with the quantities of its set A(φ,I).
struct SPhiEntry {
  NodeId node;
  double a = 0.0;       // μ(A(φ,I))
  double y = 0.0;       // Av_I(φ)
  double x = 0.0;       // a^{−1+1/p} ∫_{A(φ,I)} φ
  double mass = 0.0;    // ∫_{A(φ,I)} φ
  double p_mass = 0.0;  // ∫_{A(φ,I)} φ^p
  std::optional<NodeId> star;       // smallest member strictly containing I
  std::vector<std::size_t> leaves;  // leaf slots of A(φ,I)
};

/// Decomposition M_T φ = Σ_{I∈S_φ} y_I χ_{A(φ,I)}.
struct Linearization {
  TreePtr tree;
  double p = 2.0;
  std::vector<SPhiEntry> entries;  // preorder; entries[0] is the root
  std::vector<int> entry_of_node;  // −1 for nodes outside S_φ
  std::vector<int> owner;          // leaf slot → entry index

  bool contains(NodeId node) const { return entry_of_node.at(node.index()) >= 0; }
  const SPhiEntry& at(NodeId node) const;
  std::vector<NodeId> nodes() const;
  double mphi(std::size_t slot) const { return entries[static_cast<std::size_t>(owner[slot])].y; }
  /// Σ_{I∈S_φ} a_I y_I^p, which equals ∫(M_T φ)^p.
  double weighted_power_sum() const;
};

Linearization linearize(const StepFunction& phi, const MaximalResult& m, double p);
Linearization linearize(const StepFunction& phi, double p);

/// I ∈ S_φ exactly when I beats every proper ancestor's average (non-root I).
/// "Beats" uses the same tie tolerance as maximal_function.
bool verify_lemma31(const StepFunction& phi, const Linearization& lin);

struct Lemma32Report {
  bool nested = true;         // (i)  A(φ,J) ∩ I ≠ ∅ ⇒ J ⊆ I
  bool child_outside = true;  // (ii) internal members have a child outside S_φ
  bool covers = true;         // (iii) I is the disjoint union of A(φ,J), J ⊆ I
  bool measure_identity = true;  // (iv) a_I = μ(I) − Σ_{J*=I} μ(J)
  /// Leaf members, where (ii) has no finite analogue and is not asserted.
  std::vector<NodeId> leaf_members;

  bool all() const { return nested && child_outside && covers && measure_identity; }
};

Lemma32Report verify_lemma32(const StepFunction& phi, const Linearization& lin, double tau = kTauNum);

/// Leaf in A(φ,I) gets y_I.
StepFunction reconstruct_maximal(const Linearization& lin);

}  // namespace mtlab
