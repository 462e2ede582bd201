// core/include/asvq/parallel.h

// Copyright 2026  The asvq Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef ASVQ_PARALLEL_H_
#define ASVQ_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace asvq {

/// Execution switches shared by every multi-utterance operation.
///
/// In deterministic mode reductions are split into fixed-size blocks whose
/// partial results are combined in block order, so the result does not
/// depend on the thread count.  Otherwise each worker keeps one partial and
/// partials are merged in completion order.
struct Parallelism {
  int threads = 0;  // 0 selects std::thread::hardware_concurrency()
  bool deterministic = true;

  int ResolvedThreads() const {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
  }
};

namespace internal {

// Runs worker(thread_index) on n_threads threads (inline when 1) and
// rethrows the first exception raised by any worker.
template <class Worker>
void RunWorkers(int n_threads, Worker &&worker) {
  if (n_threads <= 1) {
    worker(0);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        worker(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto &th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace internal

/// Calls fn(i) for every i in [0, n).  fn must only write to state owned by
/// item i.
template <class Fn>
void ParallelFor(std::size_t n, const Parallelism &par, Fn &&fn) {
  const int n_threads =
      static_cast<int>(std::min<std::size_t>(par.ResolvedThreads(), n));
  std::atomic<std::size_t> next{0};
  internal::RunWorkers(n_threads, [&](int) {
    for (std::size_t i = next++; i < n; i = next++) fn(i);
  });
}

/// Reduces accumulate(acc, i) over i in [0, n), starting every partial from
/// a copy of `zero`.  Acc must provide operator+=.
template <class Acc, class Fn>
Acc ParallelReduce(std::size_t n, const Parallelism &par, const Acc &zero,
                   Fn &&accumulate) {
  constexpr std::size_t kBlock = 8;
  const int n_threads =
      static_cast<int>(std::max<std::size_t>(
          1, std::min<std::size_t>(par.ResolvedThreads(), n)));
  if (par.deterministic) {
    // Blocks are processed in waves of n_threads so at most n_threads
    // partials are alive; each is merged in block order.
    const std::size_t n_blocks = (n + kBlock - 1) / kBlock;
    const std::size_t wave_size = static_cast<std::size_t>(n_threads);
    std::vector<Acc> wave(wave_size, zero);
    Acc total = zero;
    for (std::size_t first = 0; first < n_blocks; first += wave_size) {
      const std::size_t count = std::min(wave_size, n_blocks - first);
      for (std::size_t w = 0; w < count; ++w) wave[w] = zero;
      ParallelFor(count, Parallelism{n_threads, true}, [&](std::size_t w) {
        const std::size_t b = first + w;
        const std::size_t end = std::min(n, (b + 1) * kBlock);
        for (std::size_t i = b * kBlock; i < end; ++i) accumulate(wave[w], i);
      });
      for (std::size_t w = 0; w < count; ++w) total += wave[w];
    }
    return total;
  }
  Acc total = zero;
  std::mutex total_mutex;
  std::atomic<std::size_t> next{0};
  internal::RunWorkers(n_threads, [&](int) {
    Acc local = zero;
    for (std::size_t i = next++; i < n; i = next++) accumulate(local, i);
    std::lock_guard<std::mutex> lock(total_mutex);
    total += local;
  });
  return total;
}

}  // namespace asvq

#endif  // ASVQ_PARALLEL_H_
