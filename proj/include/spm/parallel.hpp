// SPDX-License-Identifier: Apache-2.0

#ifndef SPM_PARALLEL_HPP
#define SPM_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace spm {

inline unsigned default_thread_count() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs fn(i) for i in [0, count). Work is striped across at most `threads`
/// workers; fn must only touch state owned by index i.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace spm

#endif  // SPM_PARALLEL_HPP
