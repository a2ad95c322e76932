#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace readout {

/// Splits [0, n) into at most `threads` contiguous blocks and runs
/// body(begin, end) on each. Blocks are fixed by (n, threads) only, so any
/// per-index output is independent of scheduling.
template <typename Body>
void parallel_blocks(std::size_t n, unsigned threads, Body&& body) {
  threads = std::max(1u, threads);
  const std::size_t blocks = std::min<std::size_t>(threads, n);
  if (blocks <= 1) {
    if (n > 0) body(std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(blocks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t begin = n * b / blocks;
      const std::size_t end = n * (b + 1) / blocks;
      workers.emplace_back([&, b, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[b] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace readout
