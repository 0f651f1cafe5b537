#pragma once

#include <algorithm>
#include <cstddef>

namespace mdlab {

// Kernel dispatch: every hot loop runs either through the OpenMP path or the
// serial reference path (kept for testing and for the benchmark comparison).
bool parallel_enabled();
void set_parallel_enabled(bool on);

// Applies the MDLAB_THREADS cap (if set) to the OpenMP runtime. Idempotent.
void init_threads();
int thread_count();

namespace par {

template <class F>
void for_n(std::ptrdiff_t n, F&& f) {
  if (parallel_enabled()) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
  }
}

// Reduction over i of doubles produced by f; sum order differs between the two
// paths only by associativity.
template <class F>
double sum_n(std::ptrdiff_t n, F&& f) {
  double acc = 0.0;
  if (parallel_enabled()) {
#pragma omp parallel for schedule(static) reduction(+ : acc)
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += f(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) acc += f(i);
  }
  return acc;
}

template <class F>
double max_n(std::ptrdiff_t n, F&& f) {
  double acc = 0.0;
  if (parallel_enabled()) {
#pragma omp parallel for schedule(static) reduction(max : acc)
    for (std::ptrdiff_t i = 0; i < n; ++i) acc = std::max(acc, f(i));
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) acc = std::max(acc, f(i));
  }
  return acc;
}

}  // namespace par
}  // namespace mdlab
