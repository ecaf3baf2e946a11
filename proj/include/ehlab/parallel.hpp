#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace ehlab {

/// Worker count: EHLAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls body(i) for every i in [0, n). Work is split into contiguous chunks
/// over thread_count() threads. Callers write results by index, so output does
/// not depend on the thread count. The first exception thrown by any chunk is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Independent generator for item `index` of a run seeded with `seed`.
/// Parallel and serial sweeps draw identical streams.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace ehlab
