#pragma once

#include <memory>
#include <span>
#include <vector>

#include "mtlab/measure_tree.hpp"

namespace mtlab {

using TreePtr = std::shared_ptr<const MeasureTree>;

inline TreePtr share(MeasureTree tree) { return std::make_shared<const MeasureTree>(std::move(tree)); }

/// Nonnegative function constant on the leaves of a tree. Values are indexed
/// by leaf slot. Node integrals are computed once, bottom-up, at construction.
class StepFunction {
 public:
  StepFunction(TreePtr tree, std::vector<double> leaf_values);

  static StepFunction constant(TreePtr tree, double c);

  const MeasureTree& tree() const { return *tree_; }
  const TreePtr& tree_ptr() const { return tree_; }

  std::span<const double> values() const { return values_; }
  double value(std::size_t slot) const { return values_[slot]; }
  double value_at(NodeId leaf) const { return values_[tree_->leaf_slot(leaf)]; }

  /// ∫_I φ dμ.
  double integral(NodeId node) const { return node_integral_.at(node.index()); }
  double integral() const { return integral(tree_->root()); }
  /// Av_I(φ) = ∫_I φ / μ(I).
  double average(NodeId node) const { return integral(node) / tree_->measure(node); }

  /// Same function on a tree that contains this one's tree as a prefix
  /// (every old leaf is a node of the new tree).
  StepFunction lift_to(TreePtr refined) const;

  StepFunction scaled(double t) const;

 private:
  TreePtr tree_;
  std::vector<double> values_;
  std::vector<double> node_integral_;
};

struct Moments {
  double p = 2.0;
  double f = 0.0;  // ∫ φ
  double F = 0.0;  // ∫ φ^p
};

/// Σ value^p μ over all leaves.
double p_integral(const StepFunction& phi, double p);
/// Σ value^p μ over the given leaf slots.
double p_integral(const StepFunction& phi, double p, std::span<const std::size_t> slots);

/// (f, F) with f > 0 required. Throws DomainError for the zero function.
Moments moments(const StepFunction& phi, double p);

/// Σ |φ - ψ|^p μ on a shared leaf partition. Throws UsageError if the trees
/// differ structurally.
double lp_distance(const StepFunction& phi, const StepFunction& psi, double p);

/// Throws DomainError unless 1 < p <= kMaxExponent.
void require_exponent(double p);

}  // namespace mtlab
