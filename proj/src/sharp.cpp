#include "mtlab/sharp.hpp"

#include <algorithm>
#include <cmath>

#include "mtlab/bellman.hpp"
#include "mtlab/error.hpp"

namespace mtlab {

namespace {

std::vector<char> union_mask(const MeasureTree& tree, std::span<const NodeId> members) {
  std::vector<char> mask(tree.leaf_count(), 0);
  for (NodeId m : members) {
    const auto& n = tree.node(m);
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(n.leaf_begin),
              mask.begin() + static_cast<std::ptrdiff_t>(n.leaf_end), 1);
  }
  return mask;
}

struct RegionIntegrals {
  double phi_p = 0.0;
  double mphi_p = 0.0;
};

RegionIntegrals integrals_where(const StepFunction& phi, const Linearization& lin, const std::vector<char>& mask,
                                char want) {
  CompensatedSum a;
  CompensatedSum b;
  const auto& t = phi.tree();
  for (std::size_t s = 0; s < t.leaf_count(); ++s) {
    if (mask[s] != want) continue;
    const double mu = t.leaf_measure(s);
    a += std::pow(phi.value(s), lin.p) * mu;
    b += std::pow(lin.mphi(s), lin.p) * mu;
  }
  return {a.value(), b.value()};
}

double member_power_sum(const Linearization& lin, std::span<const NodeId> members) {
  CompensatedSum s;
  for (NodeId m : members) s += lin.tree->measure(m) * std::pow(lin.at(m).y, lin.p);
  return s.value();
}

void require_beta(double beta, bool allow_zero) {
  if (!(beta > 0.0 || (allow_zero && beta == 0.0)) || !std::isfinite(beta)) {
    throw DomainError("beta must be positive");
  }
}

}  // namespace

void require_disjoint_family(const Linearization& lin, std::span<const NodeId> members) {
  const auto& tree = *lin.tree;
  std::vector<NodeId> sorted(members.begin(), members.end());
  for (NodeId m : sorted) {
    if (!tree.valid(m) || !lin.contains(m)) {
      throw UsageError("family member " + std::to_string(m.value) + " is not in S_phi");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [&](NodeId a, NodeId b) { return tree.node(a).leaf_begin < tree.node(b).leaf_begin; });
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    if (tree.node(sorted[k]).leaf_begin < tree.node(sorted[k - 1]).leaf_end) {
      throw UsageError("family members " + std::to_string(sorted[k - 1].value) + " and " +
                       std::to_string(sorted[k].value) + " are not disjoint");
    }
  }
}

bool is_maximal_family(const Linearization& lin, std::span<const NodeId> members) {
  require_disjoint_family(lin, members);
  const auto& tree = *lin.tree;
  const auto mask = union_mask(tree, members);
  std::vector<std::size_t> prefix(mask.size() + 1, 0);
  for (std::size_t s = 0; s < mask.size(); ++s) prefix[s + 1] = prefix[s] + static_cast<std::size_t>(mask[s]);
  for (const auto& e : lin.entries) {
    const auto& n = tree.node(e.node);
    if (prefix[n.leaf_end] == prefix[n.leaf_begin]) return false;
  }
  return true;
}

IneqTerms ineq_terms(const Linearization& lin, std::span<const NodeId> members, double beta) {
  IneqTerms t;
  for (NodeId m : members) {
    t.member_y.push_back(lin.at(m).y);
    t.member_measure.push_back(lin.tree->measure(m));
  }
  for (const auto& e : lin.entries) {
    const double rho = e.a / lin.tree->measure(e.node);
    t.nodes.push_back(e.node);
    t.rho.push_back(rho);
    t.tau.push_back((beta + 1.0) - beta * rho);
  }
  return t;
}

InequalityTerms complement_terms(const StepFunction& phi, const Linearization& lin,
                                 std::span<const NodeId> members, double beta) {
  require_beta(beta, true);
  const double p = lin.p;
  const auto mask = union_mask(phi.tree(), members);
  const auto out = integrals_where(phi, lin, mask, 0);
  const double fp = std::pow(phi.integral(), p);
  const double h = member_power_sum(lin, members);
  return {out.phi_p, (fp - h) / std::pow(beta + 1.0, p - 1.0) + maximal_weight(p, beta) * out.mphi_p};
}

InequalityTerms union_terms(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                            double beta) {
  require_beta(beta, true);
  const double p = lin.p;
  const auto mask = union_mask(phi.tree(), members);
  const auto in = integrals_where(phi, lin, mask, 1);
  const double h = member_power_sum(lin, members);
  return {in.phi_p, h / std::pow(beta + 1.0, p - 1.0) + maximal_weight(p, beta) * in.mphi_p};
}

InequalityTerms whole_space_terms(const StepFunction& phi, const Linearization& lin, double beta) {
  require_beta(beta, true);
  const double p = lin.p;
  const std::vector<char> none(phi.tree().leaf_count(), 0);
  const auto all = integrals_where(phi, lin, none, 0);
  const double fp = std::pow(phi.integral(), p);
  return {all.phi_p, fp / std::pow(beta + 1.0, p - 1.0) + maximal_weight(p, beta) * all.mphi_p};
}

double verify_thm31(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                    double beta) {
  require_beta(beta, false);
  if (!is_maximal_family(lin, members)) throw UsageError("verify_thm31: family is not maximal in S_phi");
  return complement_terms(phi, lin, members, beta).slack();
}

double verify_thm32(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                    double beta) {
  require_beta(beta, false);
  require_disjoint_family(lin, members);
  return union_terms(phi, lin, members, beta).slack();
}

double verify_cor31(const StepFunction& phi, const Linearization& lin, std::span<const NodeId> members,
                    double beta) {
  require_beta(beta, false);
  require_disjoint_family(lin, members);
  return complement_terms(phi, lin, members, beta).slack();
}

double verify_310(const StepFunction& phi, const Linearization& lin, double beta) {
  require_beta(beta, false);
  return whole_space_terms(phi, lin, beta).slack();
}

double verify_310(const StepFunction& phi, double p, double beta) { return verify_310(phi, linearize(phi, p), beta); }

double gap_at_beta_star(const StepFunction& phi, const Linearization& lin) {
  const Moments mo = moments(phi, lin.p);
  const auto bp = BellmanParams::make(lin.p, mo.f, mo.F);
  return whole_space_terms(phi, lin, std::max(0.0, bp.beta_star)).slack();
}

double gap_at_beta_star(const StepFunction& phi, double p) { return gap_at_beta_star(phi, linearize(phi, p)); }

std::vector<NodeId> minimal_members(const Linearization& lin) {
  std::vector<bool> has_inner(lin.entries.size(), false);
  for (const auto& e : lin.entries) {
    if (e.star) has_inner[static_cast<std::size_t>(lin.entry_of_node[e.star->index()])] = true;
  }
  std::vector<NodeId> out;
  for (std::size_t k = 0; k < lin.entries.size(); ++k) {
    if (!has_inner[k]) out.push_back(lin.entries[k].node);
  }
  return out;
}

FamilySelection sample_family(const Linearization& lin, std::mt19937_64& rng, bool complete) {
  const auto& tree = *lin.tree;
  std::vector<NodeId> order = lin.nodes();
  std::shuffle(order.begin(), order.end(), rng);
  const double keep = std::uniform_real_distribution<double>(0.15, 0.85)(rng);
  std::bernoulli_distribution coin(keep);
  std::vector<char> covered(tree.leaf_count(), 0);
  auto free_range = [&](NodeId n) {
    const auto& nd = tree.node(n);
    for (std::size_t s = nd.leaf_begin; s < nd.leaf_end; ++s) {
      if (covered[s]) return false;
    }
    return true;
  };
  auto take = [&](NodeId n, FamilySelection& fam) {
    const auto& nd = tree.node(n);
    std::fill(covered.begin() + static_cast<std::ptrdiff_t>(nd.leaf_begin),
              covered.begin() + static_cast<std::ptrdiff_t>(nd.leaf_end), 1);
    fam.members.push_back(n);
  };
  FamilySelection fam;
  for (NodeId n : order) {
    if (!coin(rng)) continue;
    // A node meeting the union is nested with some member, so it is excluded.
    if (free_range(n)) take(n, fam);
  }
  if (complete) {
    for (NodeId n : minimal_members(lin)) {
      if (free_range(n)) take(n, fam);
    }
    fam.kind = FamilyKind::maximal;
  } else {
    fam.kind = is_maximal_family(lin, fam.members) ? FamilyKind::maximal : FamilyKind::plain;
  }
  std::sort(fam.members.begin(), fam.members.end());
  return fam;
}

std::vector<double> beta_grid() {
  std::vector<double> out;
  for (int k = 0; k < 25; ++k) out.push_back(std::pow(10.0, -3.0 + 6.0 * k / 24.0));
  return out;
}

}  // namespace mtlab
