#ifndef ERGOGRAPH_PARALLEL_HPP
#define ERGOGRAPH_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ergograph {

// Upper bound on worker threads used by the parallel kernels (default 1).
void set_thread_limit(unsigned n);
unsigned thread_limit();

// Splits [0, n) into `chunks` fixed ranges and calls fn(chunk, begin, end) for each.
// The split does not depend on the thread count, so callers that reduce per-chunk
// results in chunk order get identical answers for any limit.
template <class F>
void parallel_chunks(std::size_t n, std::size_t chunks, F&& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n));
  auto range = [&](std::size_t k) { return std::pair{n * k / chunks, n * (k + 1) / chunks}; };
  const std::size_t workers = std::min<std::size_t>(thread_limit(), chunks);
  if (workers <= 1) {
    for (std::size_t k = 0; k < chunks; ++k) {
      auto [b, e] = range(k);
      fn(k, b, e);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < chunks; k += workers) {
          auto [b, e] = range(k);
          fn(k, b, e);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ergograph

#endif
