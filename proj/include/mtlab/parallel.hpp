#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace mtlab {

/// Worker cap from LAB_THREADS (default: hardware concurrency, at least 1).
unsigned worker_count();

/// Runs fn(0..n−1) on up to worker_count() threads. Each index runs exactly
/// once; results must be written to per-index slots by the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

/// SplitMix64 mix of (seed, stream): independent seeds per restart/instance.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace mtlab
