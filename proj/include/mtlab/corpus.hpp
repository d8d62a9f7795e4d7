#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "mtlab/step_function.hpp"

namespace mtlab {

struct CorpusShape {
  int max_depth = 8;
  int max_arity = 3;
  double split_probability = 0.65;  // for non-root nodes above max_depth
};

/// Random tree: the root always splits, deeper nodes split with the given
/// probability; arity uniform in [2, max_arity]; child fractions random.
MeasureTree random_tree(std::mt19937_64& rng, const CorpusShape& shape = {});

/// Random nonnegative leaf values with zeros, ties and wide ranges mixed in.
/// Never the zero function.
StepFunction random_function(std::mt19937_64& rng, TreePtr tree);

struct CorpusInstance {
  std::uint64_t seed = 0;
  double p = 2.0;
  StepFunction phi;
};

/// Instance i is drawn from split_seed(seed, i) with exponent ps[i % ps.size()].
std::vector<CorpusInstance> make_corpus(std::uint64_t seed, std::size_t count, std::span<const double> ps,
                                        const CorpusShape& shape = {});

}  // namespace mtlab
