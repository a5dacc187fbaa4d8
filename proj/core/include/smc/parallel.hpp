#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace smc {

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  std::size_t hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// chunked parallel loop over [0, n). fn(i) must write only to slot i of some
// preallocated output, so the result is identical for any worker count.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (workers > n) workers = n;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = lo + chunk < n ? lo + chunk : n;
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace smc
