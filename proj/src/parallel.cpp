#include "mdlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace mdlab {

namespace {
std::atomic<bool> g_parallel{true};
std::atomic<bool> g_threads_init{false};
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel_enabled(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

void init_threads() {
  if (g_threads_init.exchange(true)) return;
#if defined(_OPENMP)
  if (const char* env = std::getenv("MDLAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
  }
#endif
}

int thread_count() {
#if defined(_OPENMP)
  return parallel_enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

}  // namespace mdlab
