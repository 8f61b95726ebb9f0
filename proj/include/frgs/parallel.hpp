#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace frgs {

/// Number of worker threads; capped by the FRGS_THREADS environment variable.
inline unsigned thread_count()
{
  static const unsigned count = [] {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FRGS_THREADS")) {
      try {
        long v = std::stol(env);
        if (v >= 1)
          return std::min<unsigned>(static_cast<unsigned>(v), hw);
      } catch (...) {
      }
    }
    return hw;
  }();
  return count;
}

/// Calls fn(begin, end) over disjoint chunks of [0, count). Chunks are
/// independent, so callers that write per-index results and reduce them
/// afterwards get thread-count-independent output.
template<class Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t grain = std::size_t{1} << 14)
{
  const unsigned threads = thread_count();
  if (threads <= 1 || count <= grain) {
    fn(std::size_t{0}, count);
    return;
  }
  const std::size_t chunks = std::min<std::size_t>(threads, (count + grain - 1) / grain);
  const std::size_t step = (count + chunks - 1) / chunks;
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks - 1);
    for (std::size_t c = 1; c < chunks; ++c) {
      const std::size_t b = c * step;
      const std::size_t e = std::min(count, b + step);
      if (b < e)
        pool.emplace_back([&fn, &errors, c, b, e] {
          try {
            fn(b, e);
          } catch (...) {
            errors[c] = std::current_exception();
          }
        });
    }
    try {
      fn(std::size_t{0}, std::min(count, step));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  // Rethrow the lowest-chunk failure so the reported error does not depend
  // on thread timing.
  for (auto& err : errors)
    if (err)
      std::rethrow_exception(err);
}

} // namespace frgs
