#pragma once

#include <cstddef>
#include <vector>

#include <omp.h>

namespace qmeter {

// Ensemble execution: every trajectory writes only into its own slot, so the
// OpenMP kernel and the serial reference produce identical memory contents
// and downstream reductions can run in fixed trajectory-index order.  That
// makes run output independent of the worker count.

template <typename Fn>
void serial_for_index(std::size_t n, Fn&& fn) {
  for (std::size_t i = 0; i < n; ++i) fn(i);
}

// workers <= 0 uses the OpenMP default thread count.
template <typename Fn>
void parallel_for_index(std::size_t n, int workers, Fn&& fn) {
  if (workers == 1) {
    serial_for_index(n, fn);
    return;
  }
  const long long m = static_cast<long long>(n);
  if (workers > 0) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(workers)
    for (long long i = 0; i < m; ++i) fn(static_cast<std::size_t>(i));
  } else {
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < m; ++i) fn(static_cast<std::size_t>(i));
  }
}

// Left-to-right sum; used after parallel fills so the reduction order (and
// therefore the floating-point result) never depends on thread count.
inline double ordered_sum(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc;
}

}  // namespace qmeter
