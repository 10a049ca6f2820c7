#pragma once

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace tokenwarp {

// Runs fn(i) for i in [0, count). Each index is processed exactly once and
// writes must go to disjoint slots, so results do not depend on thread count.
// threads <= 1 runs inline; threads == 0 picks hardware concurrency.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& fn) {
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  int chunk = (count + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    int begin = w * chunk;
    int end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (int i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace tokenwarp
