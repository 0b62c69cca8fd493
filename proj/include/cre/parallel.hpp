#pragma once

#include <exception>
#include <thread>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cre {

// requested == 0 means "all hardware threads".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
#endif
}

// Runs fn(0..n-1). Tasks must be independent: each writes only its own output
// slot and draws randomness from a seed derived from its index, so the serial
// path (n_threads <= 1) and the OpenMP path produce identical results.
//
// If tasks throw, the exception of the lowest task index is rethrown after the
// loop completes, again identical in both paths.
template <class F>
void parallel_for(int n, int n_threads, F&& fn) {
  n_threads = resolve_threads(n_threads);
#ifdef _OPENMP
  if (n_threads > 1 && n > 1) {
    std::vector<std::exception_ptr> errors(n);
#pragma omp parallel for schedule(dynamic) num_threads(n_threads)
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
    return;
  }
#endif
  std::exception_ptr first;
  int first_index = -1;
  for (int i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      if (first_index < 0) {
        first = std::current_exception();
        first_index = i;
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace cre
