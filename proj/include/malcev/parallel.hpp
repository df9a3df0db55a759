#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace malcev {

  // Splits [0, n) into `threads` contiguous chunks and runs fn(begin, end,
  // chunk) on each. With threads <= 1 everything runs on the caller's
  // thread. Chunk boundaries depend only on (n, threads), never on timing.
  template <typename Fn>
  void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
      fn(std::size_t(0), n, std::size_t(0));
      return;
    }
    std::size_t const chunks = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
      std::size_t begin = n * c / chunks;
      std::size_t end   = n * (c + 1) / chunks;
      pool.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  inline std::size_t number_of_chunks(std::size_t n, unsigned threads) {
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2) {
      return 1;
    }
    return std::min<std::size_t>(threads, n);
  }

}  // namespace malcev
