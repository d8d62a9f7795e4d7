#include "mtlab/measure_tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mtlab/error.hpp"

namespace mtlab {

namespace {

std::string node_label(std::size_t index) {
  return "node " + std::to_string(index);
}

}  // namespace

MeasureTree::MeasureTree() {
  nodes_.push_back(Node{std::nullopt, {}, 1.0, 0, 0, 1});
  rebuild_layout();
}

MeasureTree MeasureTree::from_parents(const std::vector<std::optional<NodeId>>& parents,
                                      const std::vector<double>& measures, double tau_meas) {
  if (parents.size() != measures.size()) {
    throw FormatError("parent and measure tables differ in length");
  }
  if (parents.empty()) {
    throw FormatError("tree has no nodes");
  }
  if (parents.size() > kMaxTreeNodes) {
    throw CapacityError("tree exceeds " + std::to_string(kMaxTreeNodes) + " nodes");
  }
  MeasureTree tree;
  tree.nodes_.assign(parents.size(), Node{});
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < parents.size(); ++i) {
    Node& n = tree.nodes_[i];
    n.measure = measures[i];
    n.parent = parents[i];
    if (!parents[i]) {
      if (root) {
        throw FormatError(node_label(i) + ": second parentless node (root is " + node_label(*root) + ")");
      }
      root = i;
      continue;
    }
    const std::size_t pi = parents[i]->index();
    if (pi >= parents.size()) {
      throw FormatError(node_label(i) + ": parent id " + std::to_string(pi) + " does not exist");
    }
    if (pi == i) {
      throw FormatError(node_label(i) + ": is its own parent");
    }
    tree.nodes_[pi].children.push_back(NodeId{static_cast<std::uint32_t>(i)});
  }
  if (!root) {
    throw FormatError("tree has no root (every node has a parent)");
  }
  tree.root_ = NodeId{static_cast<std::uint32_t>(*root)};
  tree.rebuild_layout();
  if (tree.preorder_.size() != tree.nodes_.size()) {
    std::vector<bool> seen(tree.nodes_.size(), false);
    for (NodeId id : tree.preorder_) seen[id.index()] = true;
    const auto it = std::find(seen.begin(), seen.end(), false);
    throw FormatError(node_label(static_cast<std::size_t>(it - seen.begin())) +
                      ": not reachable from the root (cycle in parent links)");
  }
  tree.validate(tau_meas);
  return tree;
}

void MeasureTree::rebuild_layout() {
  leaves_.clear();
  preorder_.clear();
  preorder_.reserve(nodes_.size());
  // Iterative DFS; children pushed in reverse so they pop in order.
  std::vector<std::pair<NodeId, bool>> stack;
  stack.emplace_back(root_, false);
  nodes_[root_.index()].depth = 0;
  while (!stack.empty()) {
    auto [id, done] = stack.back();
    stack.pop_back();
    Node& n = nodes_[id.index()];
    if (done) {
      n.leaf_end = leaves_.size();
      continue;
    }
    if (preorder_.size() >= nodes_.size()) break;  // cycle guard
    preorder_.push_back(id);
    n.leaf_begin = leaves_.size();
    if (n.children.empty()) {
      leaves_.push_back(id);
      n.leaf_end = leaves_.size();
      continue;
    }
    stack.emplace_back(id, true);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      nodes_[it->index()].depth = n.depth + 1;
      stack.emplace_back(*it, false);
    }
  }
}

void MeasureTree::validate(double tau_meas) const {
  const Node& r = nodes_[root_.index()];
  if (std::abs(r.measure - 1.0) > tau_meas) {
    std::ostringstream os;
    os.precision(17);
    os << node_label(root_.index()) << ": root measure " << r.measure << " is not 1";
    throw FormatError(os.str());
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (!(n.measure > 0.0) || !std::isfinite(n.measure)) {
      throw FormatError(node_label(i) + ": measure must be strictly positive");
    }
    if (n.measure > 1.0 + tau_meas) {
      throw FormatError(node_label(i) + ": measure exceeds 1");
    }
    if (n.children.empty()) continue;
    if (n.children.size() < 2) {
      throw FormatError(node_label(i) + ": internal node has a single child");
    }
    CompensatedSum sum;
    for (NodeId c : n.children) sum += nodes_[c.index()].measure;
    if (std::abs(sum.value() - n.measure) > tau_meas * n.measure) {
      std::ostringstream os;
      os.precision(17);
      os << node_label(i) << ": children measures sum to " << sum.value() << ", parent has " << n.measure;
      throw FormatError(os.str());
    }
  }
}

std::size_t MeasureTree::leaf_slot(NodeId leaf) const {
  const Node& n = node(leaf);
  if (!n.children.empty()) {
    throw UsageError(node_label(leaf.index()) + " is not a leaf");
  }
  return n.leaf_begin;
}

bool MeasureTree::contains(NodeId outer, NodeId inner) const {
  if (outer == inner) return true;
  const Node& o = node(outer);
  const Node& i = node(inner);
  // Every internal node has >= 2 children, so distinct nodes never share a
  // leaf range; range inclusion plus depth order is set inclusion.
  return o.depth < i.depth && o.leaf_begin <= i.leaf_begin && i.leaf_end <= o.leaf_end;
}

int MeasureTree::height() const {
  int h = 0;
  for (NodeId l : leaves_) h = std::max(h, nodes_[l.index()].depth);
  return h;
}

double MeasureTree::max_leaf_measure() const {
  double m = 0.0;
  for (NodeId l : leaves_) m = std::max(m, nodes_[l.index()].measure);
  return m;
}

double MeasureTree::min_leaf_measure() const {
  double m = 1.0;
  for (NodeId l : leaves_) m = std::min(m, nodes_[l.index()].measure);
  return m;
}

std::vector<NodeId> MeasureTree::split_leaf(NodeId leaf, std::span<const double> fractions,
                                            double tau_meas) {
  const LeafSplit one{leaf, std::vector<double>(fractions.begin(), fractions.end())};
  return split_leaves(std::span<const LeafSplit>(&one, 1), tau_meas).front();
}

std::vector<std::vector<NodeId>> MeasureTree::split_leaves(std::span<const LeafSplit> splits, double tau_meas) {
  std::size_t added = 0;
  for (const auto& sp : splits) {
    if (!valid(sp.leaf) || !is_leaf(sp.leaf)) {
      throw UsageError("refine_leaf: " + node_label(sp.leaf.index()) + " is not a leaf");
    }
    if (sp.fractions.size() < 2) {
      throw UsageError("refine_leaf: need at least two fractions");
    }
    CompensatedSum total;
    for (double f : sp.fractions) {
      if (!(f > 0.0)) throw UsageError("refine_leaf: fractions must be positive");
      total += f;
    }
    if (std::abs(total.value() - 1.0) > tau_meas) {
      throw UsageError("refine_leaf: fractions do not sum to 1");
    }
    added += sp.fractions.size();
  }
  if (nodes_.size() + added > kMaxTreeNodes) {
    throw CapacityError("refine_leaf: tree would exceed node capacity");
  }
  std::vector<std::vector<NodeId>> out;
  out.reserve(splits.size());
  for (const auto& sp : splits) {
    if (!nodes_[sp.leaf.index()].children.empty()) {
      throw UsageError("refine_leaf: " + node_label(sp.leaf.index()) + " split twice");
    }
    const double m = nodes_[sp.leaf.index()].measure;
    std::vector<NodeId> created;
    created.reserve(sp.fractions.size());
    // Last child takes the remainder so the children sum to the parent exactly
    // up to one rounding.
    double assigned = 0.0;
    for (std::size_t k = 0; k < sp.fractions.size(); ++k) {
      const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
      double cm = (k + 1 == sp.fractions.size()) ? m - assigned : sp.fractions[k] * m;
      if (!(cm > 0.0)) cm = sp.fractions[k] * m;
      assigned += cm;
      nodes_.push_back(Node{sp.leaf, {}, cm, 0, 0, 0});
      nodes_[sp.leaf.index()].children.push_back(id);
      created.push_back(id);
    }
    out.push_back(std::move(created));
  }
  rebuild_layout();
  return out;
}

bool MeasureTree::same_structure(const MeasureTree& other, double tol) const {
  if (nodes_.size() != other.nodes_.size() || root_ != other.root_) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.parent != b.parent || a.children != b.children) return false;
    if (std::abs(a.measure - b.measure) > tol * std::max(a.measure, b.measure)) return false;
  }
  return true;
}

MeasureTree build_uniform(int arity, int depth) {
  if (arity < 2) throw DomainError("build_uniform: arity must be >= 2");
  if (depth < 1) throw DomainError("build_uniform: depth must be >= 1");
  std::size_t total = 1;
  std::size_t level = 1;
  for (int d = 0; d < depth; ++d) {
    if (level > kMaxTreeNodes / static_cast<std::size_t>(arity)) {
      throw CapacityError("build_uniform: arity^depth leaves exceed node capacity");
    }
    level *= static_cast<std::size_t>(arity);
    total += level;
    if (total > kMaxTreeNodes) {
      throw CapacityError("build_uniform: arity^depth leaves exceed node capacity");
    }
  }
  std::vector<std::optional<NodeId>> parents{std::nullopt};
  std::vector<double> measures{1.0};
  parents.reserve(total);
  measures.reserve(total);
  std::size_t level_begin = 0;
  std::size_t level_end = 1;
  for (int d = 0; d < depth; ++d) {
    const double m = std::pow(static_cast<double>(arity), -(d + 1));
    for (std::size_t p = level_begin; p < level_end; ++p) {
      for (int c = 0; c < arity; ++c) {
        parents.emplace_back(NodeId{static_cast<std::uint32_t>(p)});
        measures.push_back(m);
      }
    }
    level_begin = level_end;
    level_end = parents.size();
  }
  return MeasureTree::from_parents(parents, measures);
}

std::vector<double> NestedChain::piece_measures() const {
  std::vector<double> out;
  out.reserve(rings.size() + 1);
  for (NodeId r : rings) out.push_back(tree.measure(r));
  out.push_back(tree.measure(chain.back()));
  return out;
}

NestedChain build_nested_chain(std::span<const double> core_ratios, int ring_subdivision) {
  if (core_ratios.empty()) throw DomainError("build_nested_chain: ratio list is empty");
  if (ring_subdivision != 0 && ring_subdivision < 2) {
    throw DomainError("build_nested_chain: ring subdivision must be 0 or >= 2");
  }
  for (double a : core_ratios) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("build_nested_chain: ratios must lie in (0,1)");
  }
  const int K = static_cast<int>(core_ratios.size());
  std::vector<std::optional<NodeId>> parents{std::nullopt};
  std::vector<double> measures{1.0};
  auto add = [&](std::size_t parent, double m) {
    if (parents.size() >= kMaxTreeNodes) {
      throw CapacityError("build_nested_chain: tree exceeds node capacity");
    }
    parents.emplace_back(NodeId{static_cast<std::uint32_t>(parent)});
    measures.push_back(m);
    return parents.size() - 1;
  };
  NestedChain out;
  std::vector<std::size_t> chain{0};
  std::vector<std::size_t> rings;
  for (int k = 0; k < K; ++k) {
    const std::size_t ik = chain.back();
    const double mk = measures[ik];
    const double a = core_ratios[static_cast<std::size_t>(k)];
    rings.push_back(add(ik, mk * (1.0 - a)));
    chain.push_back(add(ik, mk - measures[rings.back()]));
  }
  // Uniform subdivision of each ring, K - k levels deep.
  for (int k = 0; k < K && ring_subdivision > 0; ++k) {
    std::vector<std::size_t> frontier{rings[static_cast<std::size_t>(k)]};
    for (int level = 0; level < K - k; ++level) {
      std::vector<std::size_t> next;
      for (std::size_t p : frontier) {
        const double m = measures[p] / ring_subdivision;
        for (int c = 0; c < ring_subdivision; ++c) next.push_back(add(p, m));
      }
      frontier = std::move(next);
    }
  }
  out.tree = MeasureTree::from_parents(parents, measures);
  for (std::size_t c : chain) out.chain.emplace_back(static_cast<std::uint32_t>(c));
  for (std::size_t r : rings) out.rings.emplace_back(static_cast<std::uint32_t>(r));
  out.ring_of_leaf.assign(out.tree.leaf_count(), K);
  for (int k = 0; k < K; ++k) {
    const auto& n = out.tree.node(out.rings[static_cast<std::size_t>(k)]);
    for (std::size_t s = n.leaf_begin; s < n.leaf_end; ++s) out.ring_of_leaf[s] = k;
  }
  return out;
}

MeasureTree refine_leaf(const MeasureTree& tree, NodeId leaf, std::span<const double> fractions) {
  MeasureTree copy = tree;
  copy.split_leaf(leaf, fractions);
  return copy;
}

Subfamily select_subfamily(const MeasureTree& tree, NodeId node, double a) {
  if (!tree.valid(node)) throw UsageError("select_subfamily: node does not exist");
  if (!(a > 0.0 && a < 1.0)) throw DomainError("select_subfamily: a must lie in (0,1)");
  Subfamily out{tree, {}, 0.0};
  const double mi = tree.measure(node);
  const double target = (1.0 - a) * mi;
  const double slack = kTauMeas * mi;

  if (tree.is_leaf(node)) {
    const double frac[2] = {1.0 - a, a};
    auto kids = out.tree.split_leaf(node, frac);
    out.members.push_back(kids.front());
    out.total_measure = out.tree.measure(kids.front());
    return out;
  }

  const auto& n = tree.node(node);
  std::vector<std::size_t> slots(n.leaf_end - n.leaf_begin);
  std::iota(slots.begin(), slots.end(), n.leaf_begin);
  std::stable_sort(slots.begin(), slots.end(), [&](std::size_t x, std::size_t y) {
    return tree.leaf_measure(x) > tree.leaf_measure(y);
  });

  CompensatedSum taken;
  std::optional<NodeId> first_skipped;
  for (std::size_t s : slots) {
    const double remaining = target - taken.value();
    if (remaining <= slack) break;
    const double m = tree.leaf_measure(s);
    if (m <= remaining + slack) {
      out.members.push_back(tree.leaf_at(s));
      taken += m;
    } else if (!first_skipped) {
      first_skipped = tree.leaf_at(s);
    }
  }
  const double remaining = target - taken.value();
  if (remaining > slack && first_skipped) {
    const double m = tree.measure(*first_skipped);
    const double frac[2] = {remaining / m, 1.0 - remaining / m};
    auto kids = out.tree.split_leaf(*first_skipped, frac);
    out.members.push_back(kids.front());
    taken += out.tree.measure(kids.front());
  }
  out.total_measure = taken.value();
  return out;
}

}  // namespace mtlab
