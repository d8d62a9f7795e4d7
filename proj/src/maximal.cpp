#include "mtlab/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "mtlab/bellman.hpp"

namespace mtlab {

MaximalResult maximal_function(const StepFunction& phi) {
  const auto& tree = phi.tree();
  std::vector<double> mvals(tree.leaf_count(), 0.0);
  std::vector<NodeId> argmax(tree.leaf_count());

  struct Frame {
    NodeId node;
    double ancestor_max;  // exact max of averages strictly above `node`
    NodeId record;        // last node on the path that beat everything above it
  };
  std::vector<Frame> stack;
  stack.push_back({tree.root(), -1.0, tree.root()});
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const double av = phi.average(fr.node);
    NodeId record = fr.record;
    if (fr.node == tree.root() || exceeds(av, fr.ancestor_max)) record = fr.node;
    const double running = std::max(fr.ancestor_max, av);
    const auto& n = tree.node(fr.node);
    if (n.children.empty()) {
      argmax[n.leaf_begin] = record;
      mvals[n.leaf_begin] = phi.average(record);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back({*it, running, record});
  }
  return MaximalResult{StepFunction(phi.tree_ptr(), std::move(mvals)), std::move(argmax)};
}

double check_weak_type(const StepFunction& phi, const MaximalResult& m, double lambda) {
  CompensatedSum mass;
  CompensatedSum measure;
  const auto& t = phi.tree();
  for (std::size_t s = 0; s < t.leaf_count(); ++s) {
    if (m.mphi.value(s) > lambda) {
      mass += phi.value(s) * t.leaf_measure(s);
      measure += t.leaf_measure(s);
    }
  }
  return mass.value() - lambda * measure.value();
}

double check_weak_type(const StepFunction& phi, double lambda) {
  return check_weak_type(phi, maximal_function(phi), lambda);
}

std::vector<double> weak_type_levels(const MaximalResult& m, double eps) {
  std::vector<double> v(m.mphi.values().begin(), m.mphi.values().end());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<double> out;
  out.reserve(3 * v.size());
  for (double x : v) {
    if (x <= 0.0) continue;
    out.push_back(x * (1.0 - eps));
    out.push_back(x);
    out.push_back(x * (1.0 + eps));
  }
  return out;
}

double check_lp_bound(const StepFunction& phi, const MaximalResult& m, double p) {
  require_exponent(p);
  const double F = p_integral(phi, p);
  return std::pow(p / (p - 1.0), p) * F - p_integral(m.mphi, p);
}

double check_lp_bound(const StepFunction& phi, double p) { return check_lp_bound(phi, maximal_function(phi), p); }

double check_bellman_bound(const StepFunction& phi, const MaximalResult& m, double p) {
  const Moments mo = moments(phi, p);
  return bellman_value(p, mo.f, mo.F) - p_integral(m.mphi, p);
}

double check_bellman_bound(const StepFunction& phi, double p) {
  return check_bellman_bound(phi, maximal_function(phi), p);
}

}  // namespace mtlab
