#ifndef BUBBLE_PARALLEL_HPP_
#define BUBBLE_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace bubble
{

/// Worker count: hardware concurrency unless BUBBLE_FPT_THREADS sets it explicitly.
inline std::size_t worker_count()
{
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char * env = std::getenv("BUBBLE_FPT_THREADS"); env != nullptr && *env != '\0') {
    try {
      const long requested = std::stol(env);
      if (requested >= 1) { n = static_cast<std::size_t>(requested); }
    } catch (const std::exception &) {
      // unparsable value: keep the default
    }
  }
  return n;
}

/**
 * @brief Run body(begin, end) over fixed-size blocks of [0, n).
 *
 * Block boundaries depend only on n and block_size, never on the thread
 * count, so per-block partial results are reproducible bit for bit.
 */
template<typename Body>
void for_each_block(std::size_t n, std::size_t block_size, Body && body)
{
  if (n == 0) { return; }
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  const std::size_t workers = std::min(worker_count(), n_blocks);

  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    body(b, begin, std::min(n, begin + block_size));
  };

  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) { run_block(b); }
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next++; b < n_blocks; b = next++) {
        try {
          run_block(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) { failure = std::current_exception(); }
          next = n_blocks;
        }
      }
    });
  }
  for (auto & t : pool) { t.join(); }
  if (failure) { std::rethrow_exception(failure); }
}

/// Paths per block for Monte Carlo reductions.
inline constexpr std::size_t mc_block_size = 256;

}  // namespace bubble

#endif  // BUBBLE_PARALLEL_HPP_
