// Copyright Contributors to the mpi-forge Project
// SPDX-License-Identifier: Apache-2.0

#ifndef MPI_FORGE_PARALLEL_HPP
#define MPI_FORGE_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mpi_forge {

/// Worker count used when callers pass 0.
inline int default_thread_count() {
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Calls fn(i) for every i in [begin, end) using up to `threads` workers over
/// contiguous chunks. fn must only write state owned by index i, so results
/// never depend on the schedule. The first exception thrown is rethrown.
template <typename Fn>
void parallel_for(std::int64_t begin, std::int64_t end, int threads, Fn&& fn) {
  const std::int64_t n = end - begin;
  if (n <= 0) return;
  if (threads <= 0) threads = default_thread_count();
  const auto workers = static_cast<std::int64_t>(std::min<std::int64_t>(threads, n));
  if (workers == 1) {
    for (std::int64_t i = begin; i < end; ++i) fn(i);
    return;
  }

  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t lo = begin + n * w / workers;
    const std::int64_t hi = begin + n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace mpi_forge

#endif  // MPI_FORGE_PARALLEL_HPP
