#include "qclab/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace qclab {

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t parts = std::max(1, threads);
  parts = std::min(parts, n);
  if (parts == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(parts - 1);
  std::size_t chunk = (n + parts - 1) / parts;
  for (std::size_t p = 1; p < parts; ++p) {
    std::size_t lo = p * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  fn(0, std::min(chunk, n));
  for (auto& t : pool) t.join();
}

}  // namespace qclab
