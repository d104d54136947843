#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace mfg {

// Worker cap: min(hardware, MFG_THREADS) with MFG_THREADS unset meaning the
// hardware count. Values < 1 clamp to 1.
inline int max_threads() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("MFG_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1 && cap < hw) hw = cap;
    if (cap >= 1 && cap >= hw) hw = std::min(hw, cap);
    if (cap < 1) hw = 1;
  }
  return hw;
}

// Chunked parallel loop over [0, n). Each index must write only its own
// slots, so results are bit-identical to the sequential run. Small loops run
// inline; reductions stay with the caller in fixed node order.
template <typename Fn>
void parallel_nodes(int n, Fn&& fn, int grain = 8192) {
  const int threads = n >= 2 * grain ? std::min(max_threads(), n / grain) : 1;
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(threads));
  const int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    const int lo = t * chunk;
    const int hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn]() {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace mfg
