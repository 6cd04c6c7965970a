#pragma once

#include <thread>
#include <vector>

#include "batchbald/types.hpp"

namespace batchbald {

// Run fn(begin, end) over disjoint contiguous chunks of [0, count).
// Workers write to disjoint slots only, so results are identical to the
// serial run regardless of jobs.
template <class Fn>
void parallel_for(Index count, int jobs, Fn&& fn) {
  if (jobs < 1) jobs = 1;
  const Index max_useful = count < 1 ? 1 : count;
  const Index workers = std::min<Index>(jobs, max_useful);
  if (workers <= 1) {
    fn(Index{0}, count);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const Index chunk = (count + workers - 1) / workers;
  for (Index w = 0; w < workers; ++w) {
    const Index begin = w * chunk;
    const Index end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& th : pool) th.join();
}

}  // namespace batchbald
