#include "confreg/random.hpp"

#include <algorithm>
#include <random>

namespace confreg {

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt) {
  SplitMix64 a(seed ^ (salt * 0xd1b54a32d192ed03ULL));
  const std::uint64_t base = a();
  SplitMix64 b(base + index * 0x9e3779b97f4a7c15ULL);
  b();
  return b();
}

Vector standard_normal(std::uint64_t seed, std::uint64_t index, Eigen::Index n, std::uint64_t salt) {
  SplitMix64 eng(stream_seed(seed, index, salt));
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(eng);
  return v;
}

int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const auto t = static_cast<std::size_t>(std::max(1, resolve_threads(threads)));
  if (t == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  const std::size_t workers = std::min(t, n);
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = n * w / workers;
      const std::size_t hi = n * (w + 1) / workers;
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace confreg
