#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace spikekit {

// Worker cap from SPIKEKIT_THREADS (0 or unset = hardware concurrency).
inline std::size_t thread_limit() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SPIKEKIT_THREADS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v > 0) return static_cast<std::size_t>(v);
  }
  return hw;
}

// Runs fn(begin, end) over disjoint chunks of [0, count). Chunk boundaries are
// multiples of `align`, so callers writing packed bits never share a byte.
// Work below `min_chunk` per thread runs inline.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t align = 1, std::size_t min_chunk = 1u << 14) {
  align = std::max<std::size_t>(align, 1);
  std::size_t workers = std::min(thread_limit(), count / std::max<std::size_t>(min_chunk, 1));
  if (workers <= 1) {
    if (count > 0) fn(std::size_t{0}, count);
    return;
  }
  std::size_t chunk = (count + workers - 1) / workers;
  chunk = (chunk + align - 1) / align * align;

  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace spikekit
