#include "mtlab/linearization.hpp"

#include <cmath>

#include "mtlab/error.hpp"

namespace mtlab {

const SPhiEntry& Linearization::at(NodeId node) const {
  const int e = entry_of_node.at(node.index());
  if (e < 0) throw UsageError("node " + std::to_string(node.value) + " is not in S_phi");
  return entries[static_cast<std::size_t>(e)];
}

std::vector<NodeId> Linearization::nodes() const {
  std::vector<NodeId> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.node);
  return out;
}

double Linearization::weighted_power_sum() const {
  CompensatedSum s;
  for (const auto& e : entries) s += e.a * std::pow(e.y, p);
  return s.value();
}

Linearization linearize(const StepFunction& phi, const MaximalResult& m, double p) {
  require_exponent(p);
  const auto& tree = phi.tree();
  if (!(phi.integral() > 0.0)) throw DomainError("linearize: the zero function is excluded");
  Linearization lin;
  lin.tree = phi.tree_ptr();
  lin.p = p;
  lin.entry_of_node.assign(tree.size(), -1);
  lin.owner.assign(tree.leaf_count(), -1);

  std::vector<bool> member(tree.size(), false);
  member[tree.root().index()] = true;
  for (NodeId a : m.argmax) member[a.index()] = true;
  for (NodeId id : tree.preorder()) {
    if (!member[id.index()]) continue;
    lin.entry_of_node[id.index()] = static_cast<int>(lin.entries.size());
    SPhiEntry e;
    e.node = id;
    e.y = phi.average(id);
    if (id != tree.root()) {
      auto up = tree.parent(id);
      while (up && !member[up->index()]) up = tree.parent(*up);
      e.star = up;
    }
    lin.entries.push_back(std::move(e));
  }
  for (std::size_t s = 0; s < tree.leaf_count(); ++s) {
    const int e = lin.entry_of_node[m.argmax[s].index()];
    lin.owner[s] = e;
    lin.entries[static_cast<std::size_t>(e)].leaves.push_back(s);
  }
  for (auto& e : lin.entries) {
    CompensatedSum a;
    CompensatedSum mass;
    CompensatedSum pm;
    for (std::size_t s : e.leaves) {
      const double mu = tree.leaf_measure(s);
      a += mu;
      mass += phi.value(s) * mu;
      pm += std::pow(phi.value(s), p) * mu;
    }
    e.a = a.value();
    e.mass = mass.value();
    e.p_mass = pm.value();
    e.x = e.a > 0.0 ? std::pow(e.a, -1.0 + 1.0 / p) * e.mass : 0.0;
  }
  return lin;
}

Linearization linearize(const StepFunction& phi, double p) { return linearize(phi, maximal_function(phi), p); }

bool verify_lemma31(const StepFunction& phi, const Linearization& lin) {
  const auto& tree = phi.tree();
  std::vector<double> ancestor_max(tree.size(), -1.0);
  for (NodeId id : tree.preorder()) {
    const double here = std::max(ancestor_max[id.index()], phi.average(id));
    for (NodeId c : tree.children(id)) ancestor_max[c.index()] = here;
    if (id == tree.root()) continue;
    const bool beats_all = exceeds(phi.average(id), ancestor_max[id.index()]);
    if (beats_all != lin.contains(id)) return false;
  }
  return true;
}

Lemma32Report verify_lemma32(const StepFunction& phi, const Linearization& lin, double tau) {
  const auto& tree = phi.tree();
  Lemma32Report rep;

  // (i): the nearest member above-or-at each leaf is the leaf's owner, so no
  // member strictly inside J meets A(φ,J).
  for (std::size_t s = 0; s < tree.leaf_count() && rep.nested; ++s) {
    std::optional<NodeId> up = tree.leaf_at(s);
    while (up && !lin.contains(*up)) up = tree.parent(*up);
    if (!up || lin.entry_of_node[up->index()] != lin.owner[s]) rep.nested = false;
  }

  // (iii): leaves of I are owned by members inside I, and the a_J add up to μ(I).
  std::vector<double> a_below(tree.size(), 0.0);
  const auto order = tree.preorder();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    CompensatedSum s;
    if (lin.contains(*it)) s += lin.at(*it).a;
    for (NodeId c : tree.children(*it)) s += a_below[c.index()];
    a_below[it->index()] = s.value();
  }
  for (const auto& e : lin.entries) {
    const auto& n = tree.node(e.node);
    for (std::size_t s = n.leaf_begin; s < n.leaf_end; ++s) {
      const NodeId owner = lin.entries[static_cast<std::size_t>(lin.owner[s])].node;
      if (!tree.contains(e.node, owner)) rep.covers = false;
    }
    if (std::abs(a_below[e.node.index()] - n.measure) > tau * n.measure) rep.covers = false;
  }

  // (iv)
  std::vector<CompensatedSum> starred(lin.entries.size());
  for (const auto& e : lin.entries) {
    if (e.star) starred[static_cast<std::size_t>(lin.entry_of_node[e.star->index()])] += tree.measure(e.node);
  }
  for (std::size_t k = 0; k < lin.entries.size(); ++k) {
    const auto& e = lin.entries[k];
    const double mu = tree.measure(e.node);
    if (std::abs(e.a - (mu - starred[k].value())) > tau * mu) rep.measure_identity = false;
  }

  // (ii) at internal members only.
  for (const auto& e : lin.entries) {
    if (tree.is_leaf(e.node)) {
      rep.leaf_members.push_back(e.node);
      continue;
    }
    bool some_outside = false;
    for (NodeId c : tree.children(e.node)) some_outside = some_outside || !lin.contains(c);
    if (!some_outside) rep.child_outside = false;
  }
  return rep;
}

StepFunction reconstruct_maximal(const Linearization& lin) {
  std::vector<double> v(lin.tree->leaf_count());
  for (std::size_t s = 0; s < v.size(); ++s) v[s] = lin.mphi(s);
  return StepFunction(lin.tree, std::move(v));
}

}  // namespace mtlab
