#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace classicml {

// Worker-thread cap from CLASSICML_THREADS; absent or invalid means 1
// (single-threaded). Read once and cached.
int thread_count();

// Loops below this size stay serial: spawning a team costs more than the
// loop body saves.
inline constexpr std::size_t kMinParallelRows = 256;

// Parallel kernels must write only to per-index output slots so that the
// result is bit-identical for any thread count.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
#ifdef _OPENMP
  const int threads = thread_count();
  if (threads > 1 && n >= kMinParallelRows) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

// Explicit thread count; used by the benchmark to compare serial vs OpenMP.
template <typename Body>
void parallel_for_threads(int threads, std::size_t n, Body&& body) {
#ifdef _OPENMP
  if (threads > 1 && n > 1) {
#pragma omp parallel for num_threads(threads) schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      body(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace classicml
