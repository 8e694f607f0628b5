#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace qtn {

// Runs fn(i) for i in [0, count) on `workers` threads, each thread owning a
// contiguous index range. Callers write results into per-index slots, so the
// output is identical for any worker count.
template <class F>
void parallel_for(std::size_t count, int workers, F&& fn) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::size_t w = static_cast<std::size_t>(workers);
  if (w > count) w = count;
  std::vector<std::thread> threads;
  threads.reserve(w);
  for (std::size_t t = 0; t < w; ++t) {
    std::size_t begin = count * t / w;
    std::size_t end = count * (t + 1) / w;
    threads.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& th : threads) th.join();
}

}  // namespace qtn
