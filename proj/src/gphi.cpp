#include "mtlab/gphi.hpp"

#include <algorithm>
#include <cmath>

#include "mtlab/bellman.hpp"
#include "mtlab/error.hpp"

namespace mtlab {

namespace {

struct Block {
  NodeId node;
  double m = 0.0;  // ∫_B φ
  double P = 0.0;  // ∫_B φ^p
};

// Entry index shared by every leaf below each node, −1 if mixed.
std::vector<int> uniform_owner(const MeasureTree& tree, const Linearization& lin) {
  std::vector<int> out(tree.size(), -1);
  const auto order = tree.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& n = tree.node(*it);
    if (n.children.empty()) {
      out[it->index()] = lin.owner[n.leaf_begin];
      continue;
    }
    int o = out[n.children.front().index()];
    for (NodeId c : n.children) {
      if (out[c.index()] != o) o = -1;
    }
    out[it->index()] = o;
  }
  return out;
}

NodeId base_leaf_of(const MeasureTree& base, const MeasureTree& refined, NodeId id) {
  while (id.index() >= base.size() || !base.is_leaf(id)) id = *refined.parent(id);
  return id;
}

}  // namespace

bool GPhi::stage2_feasible() const {
  return std::all_of(records.begin(), records.end(), [](const GRecord& r) { return r.stage2_feasible; });
}

GPhi build_g(const StepFunction& phi, double p) { return build_g(phi, p, linearize(phi, p)); }

GPhi build_g(const StepFunction& phi, double p, const Linearization& lin) {
  require_exponent(p);
  const MeasureTree& base = phi.tree();
  const auto uni = uniform_owner(base, lin);

  std::vector<std::vector<Block>> blocks(lin.entries.size());
  for (NodeId id : base.preorder()) {
    const int o = uni[id.index()];
    if (o < 0) continue;
    const auto parent = base.parent(id);
    if (parent && uni[parent->index()] == o) continue;
    const auto& n = base.node(id);
    CompensatedSum pm;
    for (std::size_t s = n.leaf_begin; s < n.leaf_end; ++s) pm += std::pow(phi.value(s), p) * base.leaf_measure(s);
    blocks[static_cast<std::size_t>(o)].push_back({id, phi.integral(id), pm.value()});
  }

  std::vector<GRecord> records(lin.entries.size());
  std::vector<MeasureTree::LeafSplit> splits;
  std::vector<std::pair<NodeId, double>> whole;  // base leaf, value
  struct Partial {
    std::size_t split;
    double value;
    std::size_t record;
  };
  std::vector<Partial> partial;

  for (std::size_t e = 0; e < lin.entries.size(); ++e) {
    const auto& entry = lin.entries[e];
    GRecord& rec = records[e];
    rec.node = entry.node;
    rec.a = entry.a;
    rec.blocks = static_cast<int>(blocks[e].size());
    double M = 0.0;
    double P = 0.0;
    for (const auto& b : blocks[e]) {
      M += b.m;
      P += b.P;
    }
    if (!(M > 0.0)) continue;  // zero mass: c = 0, nothing occupied
    rec.c = std::pow(P / M, 1.0 / (p - 1.0));
    for (const auto& b : blocks[e]) {
      if (b.m > 0.0 && b.m / rec.c > base.measure(b.node) * (1.0 + kTauNum)) rec.stage2_feasible = false;
    }
    for (const auto& b : blocks[e]) {
      if (!(b.m > 0.0)) continue;
      const double value = rec.stage2_feasible ? rec.c : std::pow(b.P / b.m, 1.0 / (p - 1.0));
      const double target = std::min(b.m / value, base.measure(b.node));
      rec.gamma += target;
      // Support leaves first, then larger leaves, so g vanishes wherever φ does.
      const auto& n = base.node(b.node);
      std::vector<std::size_t> slots;
      for (std::size_t s = n.leaf_begin; s < n.leaf_end; ++s) slots.push_back(s);
      std::stable_sort(slots.begin(), slots.end(), [&](std::size_t x, std::size_t y) {
        const bool px = phi.value(x) > 0.0;
        const bool py = phi.value(y) > 0.0;
        if (px != py) return px;
        return base.leaf_measure(x) > base.leaf_measure(y);
      });
      double left = target;
      for (std::size_t s : slots) {
        if (!(left > 0.0)) break;
        const double mu = base.leaf_measure(s);
        const NodeId leaf = base.leaf_at(s);
        if (left >= mu * (1.0 - 1e-14)) {
          whole.emplace_back(leaf, value);
          rec.occupied.push_back(leaf);
          left -= mu;
          continue;
        }
        const double r = left / mu;
        if (r > 1e-14) {
          splits.push_back({leaf, {r, 1.0 - r}});
          partial.push_back({splits.size() - 1, value, e});
        }
        left = 0.0;
      }
    }
  }

  MeasureTree refined = base;
  const auto kids = refined.split_leaves(splits);
  std::vector<double> value_of(refined.size(), 0.0);
  for (const auto& [leaf, v] : whole) value_of[leaf.index()] = v;
  for (const auto& pt : partial) {
    const NodeId first = kids[pt.split].front();
    value_of[first.index()] = pt.value;
    records[pt.record].occupied.push_back(first);
  }
  for (auto& rec : records) std::sort(rec.occupied.begin(), rec.occupied.end());

  TreePtr rptr = share(std::move(refined));
  std::vector<double> gv(rptr->leaf_count());
  std::vector<int> entry_of_slot(rptr->leaf_count());
  for (std::size_t s = 0; s < rptr->leaf_count(); ++s) {
    const NodeId id = rptr->leaf_at(s);
    gv[s] = value_of[id.index()];
    entry_of_slot[s] = lin.owner[base.leaf_slot(base_leaf_of(base, *rptr, id))];
  }
  StepFunction phi_r = phi.lift_to(rptr);
  StepFunction g(rptr, std::move(gv));
  return GPhi{phi, lin, rptr, std::move(phi_r), std::move(g), std::move(records), std::move(entry_of_slot)};
}

GCheck verify_g(const StepFunction& phi, double p, const GPhi& gphi, double tau) {
  GCheck out;
  const MeasureTree& base = phi.tree();
  const auto& lin = gphi.lin;
  auto close = [&](double a, double b) { return std::abs(a - b) <= tau * std::max(1.0, std::abs(b)); };

  std::vector<char> holds_member(base.size(), 0);
  for (const auto& e : lin.entries) {
    std::optional<NodeId> up = e.node;
    while (up && !holds_member[up->index()]) {
      holds_member[up->index()] = 1;
      up = base.parent(*up);
    }
  }
  for (NodeId id : base.preorder()) {
    if (!holds_member[id.index()]) continue;
    const double dev = std::abs(gphi.g.integral(id) - phi.integral(id));
    out.max_average_dev = std::max(out.max_average_dev, dev);
    if (!close(gphi.g.integral(id), phi.integral(id))) out.averages = false;
  }

  const auto& rt = *gphi.refined;
  std::vector<CompensatedSum> gp(lin.entries.size());
  std::vector<double> phi_zero(lin.entries.size(), 0.0);
  std::vector<double> g_zero(lin.entries.size(), 0.0);
  for (std::size_t s = 0; s < rt.leaf_count(); ++s) {
    const auto e = static_cast<std::size_t>(gphi.entry_of_slot[s]);
    const double mu = rt.leaf_measure(s);
    gp[e] += std::pow(gphi.g.value(s), p) * mu;
    if (gphi.phi_refined.value(s) == 0.0) phi_zero[e] += mu;
    if (gphi.g.value(s) == 0.0) g_zero[e] += mu;
  }
  for (std::size_t e = 0; e < lin.entries.size(); ++e) {
    const double target = lin.entries[e].p_mass;
    out.max_p_dev = std::max(out.max_p_dev, std::abs(gp[e].value() - target));
    if (!close(gp[e].value(), target)) out.p_integrals = false;
    if (phi_zero[e] > g_zero[e] + tau * std::max(1.0, lin.entries[e].a)) out.zero_growth = false;
  }

  if (!close(gphi.g.integral(), phi.integral()) || !close(p_integral(gphi.g, p), p_integral(phi, p))) {
    out.moments = false;
  }
  return out;
}

StepFunction g_prime(const GPhi& gphi) {
  std::vector<double> v(gphi.refined->leaf_count());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = gphi.records[static_cast<std::size_t>(gphi.entry_of_slot[s])].c;
  return StepFunction(gphi.refined, std::move(v));
}

ResidualSplit residual_split(const GPhi& gphi, double p, double c) {
  if (!(c > 0.0)) throw DomainError("residual_split: c must be positive");
  const auto mg = maximal_function(gphi.g).mphi;
  const auto& rt = *gphi.refined;
  CompensatedSum on;
  CompensatedSum off;
  for (std::size_t s = 0; s < rt.leaf_count(); ++s) {
    const double cg = c * gphi.g.value(s);
    const double d = std::pow(std::abs(mg.value(s) - cg), p) * rt.leaf_measure(s);
    if (mg.value(s) > cg) {
      on += d;
    } else {
      off += d;
    }
  }
  return {on.value(), off.value()};
}

ResidualSplit residual_split(const GPhi& gphi, double p) {
  const Moments mo = moments(gphi.phi, p);
  return residual_split(gphi, p, omega_p(p, std::min(1.0, std::pow(mo.f, p) / mo.F)));
}

YoungDiagnostics young_diagnostics(const StepFunction& phi, double p, const GPhi& gphi) {
  if (phi.tree_ptr() != gphi.phi.tree_ptr() && !phi.tree().same_structure(gphi.phi.tree(), kTauMeas)) {
    throw UsageError("young_diagnostics: φ does not live on the base tree of g");
  }
  const StepFunction gp = g_prime(gphi);
  const auto& rt = *gphi.refined;
  CompensatedSum tp;
  CompensatedSum sp;
  CompensatedSum cross;
  for (std::size_t s = 0; s < rt.leaf_count(); ++s) {
    const double ph = gphi.phi_refined.value(s);
    const double gv = gp.value(s);
    if (gv > ph) continue;
    const double mu = rt.leaf_measure(s);
    tp += std::pow(ph, p) * mu;
    sp += std::pow(gv, p) * mu;
    cross += ph * std::pow(gv, p - 1.0) * mu;
  }
  YoungDiagnostics d;
  const double q = p / (p - 1.0);
  d.t_phi = std::pow(tp.value(), 1.0 / p);
  d.s_phi = std::pow(sp.value(), 1.0 / p);
  d.cross = cross.value();
  d.gap_340 = tp.value() / p + sp.value() / q - d.cross;
  d.holder_gap = d.t_phi * std::pow(d.s_phi, p - 1.0) - d.cross;
  return d;
}

double zero_measure(const StepFunction& g) {
  CompensatedSum z;
  for (std::size_t s = 0; s < g.tree().leaf_count(); ++s) {
    if (g.value(s) == 0.0) z += g.tree().leaf_measure(s);
  }
  return z.value();
}

double sigma_phi(const GPhi& gphi) {
  CompensatedSum s;
  for (std::size_t e = 0; e < gphi.records.size(); ++e) {
    const auto& entry = gphi.lin.entries[e];
    if (entry.a > 0.0) s += gphi.records[e].gamma * entry.p_mass / entry.a;
  }
  return s.value();
}

}  // namespace mtlab
