#ifndef MRPC_PARALLEL_HPP
#define MRPC_PARALLEL_HPP

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mrpc::par {

// Global switch for the OpenMP paths. Tests flip it off to compare the
// parallel kernels against their serial execution bit for bit.
bool enabled();
void set_enabled(bool on);

int max_threads();

// Runs f(i) for i in [0, n). Iterations must be independent; results are
// written to disjoint slots so the output is identical for any thread count.
// Small loops (n < grain) stay serial to avoid fork overhead.
template <typename F>
void parallel_for(std::ptrdiff_t n, std::ptrdiff_t grain, F&& f) {
#ifdef _OPENMP
  if (enabled() && n >= grain && omp_get_max_threads() > 1) {
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        f(i);
      } catch (...) {
#pragma omp critical(mrpc_parallel_for_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
    return;
  }
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) f(i);
}

}  // namespace mrpc::par

#endif  // MRPC_PARALLEL_HPP
