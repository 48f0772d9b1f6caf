#pragma once

#include <atomic>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace curvedraw {

namespace detail {
inline std::atomic<int> g_thread_budget{0};
}

// Worker budget for all data-parallel kernels. 0 keeps the OpenMP default.
inline void set_thread_budget(int threads) { detail::g_thread_budget = threads; }
inline int thread_budget() { return detail::g_thread_budget.load(); }

// Parallel loop over [0, n). The body must write only to its own slot(s);
// outputs are merged in index order afterwards, so results are identical
// for any thread count.
template <typename Fn>
void parallel_for(std::int64_t n, Fn&& fn) {
#ifdef _OPENMP
  const int budget = thread_budget();
  const int nthreads = budget > 0 ? budget : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 16) num_threads(nthreads)
  for (std::int64_t i = 0; i < n; ++i) fn(i);
#else
  for (std::int64_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace curvedraw
