#include "mtlab/corpus.hpp"

#include <algorithm>
#include <cmath>

#include "mtlab/error.hpp"
#include "mtlab/parallel.hpp"

namespace mtlab {

MeasureTree random_tree(std::mt19937_64& rng, const CorpusShape& shape) {
  if (shape.max_depth < 1 || shape.max_arity < 2) throw DomainError("random_tree: bad shape");
  const int depth_cap = std::uniform_int_distribution<int>(1, shape.max_depth)(rng);
  std::uniform_int_distribution<int> arity(2, shape.max_arity);
  std::uniform_real_distribution<double> weight(0.1, 1.0);
  std::bernoulli_distribution split(shape.split_probability);

  std::vector<std::optional<NodeId>> parents{std::nullopt};
  std::vector<double> measures{1.0};
  std::vector<int> depth{0};
  for (std::size_t i = 0; i < parents.size(); ++i) {
    if (depth[i] >= depth_cap) continue;
    if (i != 0 && !split(rng)) continue;
    const int k = arity(rng);
    std::vector<double> w(static_cast<std::size_t>(k));
    double total = 0.0;
    for (double& x : w) total += (x = weight(rng));
    double assigned = 0.0;
    for (int c = 0; c < k; ++c) {
      const double m = (c + 1 == k) ? measures[i] - assigned : measures[i] * w[static_cast<std::size_t>(c)] / total;
      assigned += m;
      parents.emplace_back(NodeId{static_cast<std::uint32_t>(i)});
      measures.push_back(m);
      depth.push_back(depth[i] + 1);
    }
  }
  return MeasureTree::from_parents(parents, measures);
}

StepFunction random_function(std::mt19937_64& rng, TreePtr tree) {
  const std::size_t n = tree->leaf_count();
  std::vector<double> v(n);
  const int style = std::uniform_int_distribution<int>(0, 3)(rng);
  const double zero_rate = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
  std::bernoulli_distribution zero(zero_rate);
  std::lognormal_distribution<double> wide(0.0, 1.5);
  std::uniform_int_distribution<int> small(0, 4);
  for (std::size_t s = 0; s < n; ++s) {
    switch (style) {
      case 0: v[s] = wide(rng); break;
      case 1: v[s] = static_cast<double>(small(rng)); break;  // ties
      case 2: v[s] = std::uniform_real_distribution<double>(0.0, 10.0)(rng); break;
      default: v[s] = std::pow(wide(rng), 3.0); break;  // heavy tail
    }
    if (zero(rng)) v[s] = 0.0;
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
    v[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)] = 1.0;
  }
  return StepFunction(std::move(tree), std::move(v));
}

std::vector<CorpusInstance> make_corpus(std::uint64_t seed, std::size_t count, std::span<const double> ps,
                                        const CorpusShape& shape) {
  if (ps.empty()) throw UsageError("make_corpus: no exponents");
  std::vector<CorpusInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t s = split_seed(seed, i);
    std::mt19937_64 rng(s);
    TreePtr tree = share(random_tree(rng, shape));
    out.push_back({s, ps[i % ps.size()], random_function(rng, std::move(tree))});
  }
  return out;
}

}  // namespace mtlab
