#pragma once

#include "confreg/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace confreg {

/// SplitMix64; used as a per-index stream so draws do not depend on how
/// work is split across threads.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0);

/// Standard normal vector for stream (seed, index).
Vector standard_normal(std::uint64_t seed, std::uint64_t index, Eigen::Index n, std::uint64_t salt = 0);

/// 0 means "use hardware concurrency".
int resolve_threads(int threads);

/// Calls f(i) for i in [0, n). Work is chunked statically; the first
/// exception is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

}  // namespace confreg
