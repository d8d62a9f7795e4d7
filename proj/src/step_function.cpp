#include "mtlab/step_function.hpp"

#include <cmath>
#include <string>

#include "mtlab/error.hpp"

namespace mtlab {

void require_exponent(double p) {
  if (!(p > 1.0 && p <= kMaxExponent)) {
    throw DomainError("exponent p must lie in (1, " + std::to_string(kMaxExponent) + "]");
  }
}

StepFunction::StepFunction(TreePtr tree, std::vector<double> leaf_values)
    : tree_(std::move(tree)), values_(std::move(leaf_values)) {
  if (!tree_) throw UsageError("StepFunction: null tree");
  if (values_.size() != tree_->leaf_count()) {
    throw UsageError("StepFunction: expected " + std::to_string(tree_->leaf_count()) + " leaf values, got " +
                     std::to_string(values_.size()));
  }
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("StepFunction: values must be finite and >= 0");
  }
  node_integral_.assign(tree_->size(), 0.0);
  const auto order = tree_->preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& n = tree_->node(*it);
    if (n.children.empty()) {
      node_integral_[it->index()] = values_[n.leaf_begin] * n.measure;
      continue;
    }
    CompensatedSum s;
    for (NodeId c : n.children) s += node_integral_[c.index()];
    node_integral_[it->index()] = s.value();
  }
}

StepFunction StepFunction::constant(TreePtr tree, double c) {
  const std::size_t n = tree->leaf_count();
  return StepFunction(std::move(tree), std::vector<double>(n, c));
}

StepFunction StepFunction::lift_to(TreePtr refined) const {
  if (refined->size() < tree_->size()) throw UsageError("lift_to: target is not a refinement");
  std::vector<double> out(refined->leaf_count());
  for (std::size_t s = 0; s < refined->leaf_count(); ++s) {
    NodeId id = refined->leaf_at(s);
    // Walk up to the first node that was a leaf of the original tree.
    while (id.index() >= tree_->size() || !tree_->is_leaf(id)) {
      const auto parent = refined->parent(id);
      if (!parent) throw UsageError("lift_to: target does not contain the original tree");
      id = *parent;
    }
    out[s] = values_[tree_->leaf_slot(id)];
  }
  return StepFunction(std::move(refined), std::move(out));
}

StepFunction StepFunction::scaled(double t) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= t;
  return StepFunction(tree_, std::move(v));
}

double p_integral(const StepFunction& phi, double p) {
  CompensatedSum s;
  const auto& t = phi.tree();
  for (std::size_t i = 0; i < t.leaf_count(); ++i) s += std::pow(phi.value(i), p) * t.leaf_measure(i);
  return s.value();
}

double p_integral(const StepFunction& phi, double p, std::span<const std::size_t> slots) {
  CompensatedSum s;
  const auto& t = phi.tree();
  for (std::size_t i : slots) s += std::pow(phi.value(i), p) * t.leaf_measure(i);
  return s.value();
}

Moments moments(const StepFunction& phi, double p) {
  require_exponent(p);
  const double f = phi.integral();
  if (!(f > 0.0)) throw DomainError("moments: the zero function has no admissible moments");
  return Moments{p, f, p_integral(phi, p)};
}

double lp_distance(const StepFunction& phi, const StepFunction& psi, double p) {
  if (phi.tree_ptr() != psi.tree_ptr() && !phi.tree().same_structure(psi.tree(), kTauMeas)) {
    throw UsageError("lp_distance: functions live on different leaf partitions; lift to a common refinement");
  }
  CompensatedSum s;
  const auto& t = phi.tree();
  for (std::size_t i = 0; i < t.leaf_count(); ++i) {
    s += std::pow(std::abs(phi.value(i) - psi.value(i)), p) * t.leaf_measure(i);
  }
  return s.value();
}

}  // namespace mtlab
