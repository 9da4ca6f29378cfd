#ifndef LIMREG_PARALLEL_HPP
#define LIMREG_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace limreg {

/// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
/// workers. The first exception in chunk order is rethrown after all
/// workers finish. Callers write per-index results and reduce them in index
/// order, so output does not depend on the thread count.
template <typename Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || n < 2) {
    body(std::size_t{0}, n);
    return;
  }
  const std::size_t chunks = std::min(workers, n);
  std::vector<std::exception_ptr> errors(chunks);
  {
    std::vector<std::jthread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = n * c / chunks;
      const std::size_t end = n * (c + 1) / chunks;
      pool.emplace_back([&, c, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace limreg

#endif  // LIMREG_PARALLEL_HPP
