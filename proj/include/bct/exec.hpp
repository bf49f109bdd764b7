#pragma once

#include <cstddef>
#include <span>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bct {

/// Selects between the OpenMP kernel and its serial reference. Both paths
/// produce bit-identical results; the serial one is what the oracle tests
/// and benchmarks compare against.
enum class Exec { Serial, Parallel };

inline void set_worker_count(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, n). Iterations must write disjoint outputs.
template <class Body>
void for_each_index(std::size_t n, Exec exec, Body&& body) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long long i = 0; i < count; ++i) body(static_cast<std::size_t>(i));
}

/// Number of i in [0, n) with pred(i). Integer accumulation, so the result is
/// independent of the thread count.
template <class Pred>
std::size_t count_indices(std::size_t n, Exec exec, Pred&& pred) {
  std::size_t hits = 0;
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) hits += pred(i) ? 1 : 0;
    return hits;
  }
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(static) reduction(+ : hits)
  for (long long i = 0; i < count; ++i) hits += pred(static_cast<std::size_t>(i)) ? 1 : 0;
  return hits;
}

/// Pairwise summation; fixed association order so the result does not depend
/// on how the terms were produced.
inline double pairwise_sum(std::span<const double> xs) {
  if (xs.size() <= 8) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

}  // namespace bct
