#ifndef RAMAT_PARALLEL_HPP
#define RAMAT_PARALLEL_HPP

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ramat {

// Replications are self-contained and written to per-index slots, so the
// parallel schedule cannot change any result; the serial path is kept as the
// reference the parallel one is checked against.
enum class RunPolicy { Serial, Parallel };

// Worker count for parallel runs: RAMAT_WORKERS when set, otherwise the
// OpenMP default.
int worker_count();

template <typename Fn>
void for_each_index(std::size_t count, RunPolicy policy, Fn&& fn) {
  if (policy == RunPolicy::Serial) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = worker_count();
  const auto n = static_cast<std::ptrdiff_t>(count);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace ramat

#endif  // RAMAT_PARALLEL_HPP
