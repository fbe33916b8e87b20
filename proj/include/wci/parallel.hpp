#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace wci {

/// Run fn(i) for i in [0, count) on up to `jobs` threads. Tasks own their
/// outputs by index, so results are identical for any job count.
inline void parallel_for(int jobs, long count, const std::function<void(long)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (long i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<long> next{0};
  auto worker = [&] {
    for (long i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  const int threads = static_cast<int>(std::min<long>(jobs, count));
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace wci
