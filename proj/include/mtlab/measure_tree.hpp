#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mtlab/numeric.hpp"

namespace mtlab {

/// Dense index into a tree's node table. Refinement only appends nodes, so an
/// id stays valid in every tree derived from the one that issued it.
struct NodeId {
  std::uint32_t value = 0;

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint32_t v) : value(v) {}
  constexpr std::size_t index() const { return value; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr std::size_t kMaxTreeNodes = std::size_t{1} << 22;

/// Finite truncation of a measure tree on a probability space: the root has
/// measure 1, every internal node has at least two children and the children's
/// measures add up to the parent's.
///
/// Leaves are kept in preorder, so the leaves below any node occupy a
/// contiguous range of slots. Containment of nodes is a range test.
class MeasureTree {
 public:
  struct Node {
    std::optional<NodeId> parent;
    std::vector<NodeId> children;
    double measure = 0.0;
    int depth = 0;
    std::size_t leaf_begin = 0;  // [leaf_begin, leaf_end) in leaves()
    std::size_t leaf_end = 0;
  };

  /// Single-node tree (the whole space as one leaf).
  MeasureTree();

  /// Builds from parent links (children ordered by id). Throws FormatError
  /// naming the offending node when an invariant fails.
  /// Exactly one node may lack a parent; it becomes the root.
  static MeasureTree from_parents(const std::vector<std::optional<NodeId>>& parents,
                                  const std::vector<double>& measures,
                                  double tau_meas = kTauMeas);

  NodeId root() const { return root_; }
  std::size_t size() const { return nodes_.size(); }
  bool valid(NodeId id) const { return id.index() < nodes_.size(); }

  const Node& node(NodeId id) const { return nodes_.at(id.index()); }
  double measure(NodeId id) const { return node(id).measure; }
  std::optional<NodeId> parent(NodeId id) const { return node(id).parent; }
  std::span<const NodeId> children(NodeId id) const { return node(id).children; }
  int depth(NodeId id) const { return node(id).depth; }
  bool is_leaf(NodeId id) const { return node(id).children.empty(); }

  std::span<const NodeId> leaves() const { return leaves_; }
  std::size_t leaf_count() const { return leaves_.size(); }
  /// Slot of a leaf in leaves(); throws UsageError for internal nodes.
  std::size_t leaf_slot(NodeId leaf) const;
  NodeId leaf_at(std::size_t slot) const { return leaves_.at(slot); }
  double leaf_measure(std::size_t slot) const { return nodes_[leaves_[slot].index()].measure; }

  /// Nodes in preorder (parents before children).
  std::span<const NodeId> preorder() const { return preorder_; }

  /// outer ⊇ inner as sets.
  bool contains(NodeId outer, NodeId inner) const;
  bool strictly_contains(NodeId outer, NodeId inner) const {
    return outer != inner && contains(outer, inner);
  }
  bool disjoint(NodeId a, NodeId b) const { return !contains(a, b) && !contains(b, a); }

  int height() const;
  double max_leaf_measure() const;
  double min_leaf_measure() const;

  /// Splits a leaf into children with measures fraction_i * measure(leaf).
  /// Mutates in place (caller must own the tree exclusively); existing ids and
  /// measures are untouched. Returns the new child ids.
  std::vector<NodeId> split_leaf(NodeId leaf, std::span<const double> fractions,
                                 double tau_meas = kTauMeas);

  struct LeafSplit {
    NodeId leaf;
    std::vector<double> fractions;
  };
  /// Several splits with one layout rebuild. Returns the children per split.
  std::vector<std::vector<NodeId>> split_leaves(std::span<const LeafSplit> splits,
                                                double tau_meas = kTauMeas);

  /// Structural equality of node tables with measures equal within `tol`.
  bool same_structure(const MeasureTree& other, double tol = 0.0) const;

  /// Checks every invariant; throws FormatError naming the first bad node.
  void validate(double tau_meas = kTauMeas) const;

 private:
  void rebuild_layout();

  std::vector<Node> nodes_;
  std::vector<NodeId> leaves_;
  std::vector<NodeId> preorder_;
  NodeId root_{0};
};

/// Complete arity-regular tree with leaves at `depth`.
MeasureTree build_uniform(int arity, int depth);

/// Chain I_0 ⊃ I_1 ⊃ ... ⊃ I_K with children(I_k) = {R_k, I_{k+1}}.
struct NestedChain {
  MeasureTree tree;
  std::vector<NodeId> chain;  // I_0 (root) .. I_K (core leaf)
  std::vector<NodeId> rings;  // R_0 .. R_{K-1}
  /// Ring index of each leaf slot; K for the core.
  std::vector<int> ring_of_leaf;

  int ring_count() const { return static_cast<int>(rings.size()); }
  /// Measures of R_0..R_{K-1} followed by the core.
  std::vector<double> piece_measures() const;
};

/// Ring R_k is subdivided uniformly with `ring_subdivision` children per node
/// for K - k levels, so every ring is at least one level deep and the largest
/// leaf shrinks as K grows. With `ring_subdivision` = 0 the rings are leaves.
NestedChain build_nested_chain(std::span<const double> core_ratios, int ring_subdivision);

/// New tree with `leaf` split by `fractions`.
MeasureTree refine_leaf(const MeasureTree& tree, NodeId leaf, std::span<const double> fractions);

struct Subfamily {
  MeasureTree tree;             // original tree, possibly with one leaf split
  std::vector<NodeId> members;  // pairwise disjoint strict descendants of I
  double total_measure = 0.0;
};

/// Pairwise disjoint strict descendants of I whose measures add up to
/// (1 - a) * measure(I). Leaves are taken largest first; the first leaf that
/// overshoots is split to hit the target.
Subfamily select_subfamily(const MeasureTree& tree, NodeId node, double a);

MeasureTree load_tree(const std::string& path);
void store_tree(const MeasureTree& tree, const std::string& path);

}  // namespace mtlab

template <>
struct std::hash<mtlab::NodeId> {
  std::size_t operator()(mtlab::NodeId id) const noexcept { return std::hash<std::uint32_t>{}(id.value); }
};
