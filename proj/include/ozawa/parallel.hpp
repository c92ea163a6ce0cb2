#pragma once

// Loop drivers shared by the Gram and factorization kernels. Every
// parallel path has a serial twin selected by Execution::serial; the serial
// twin is the reference the tests and benchmarks compare against.

#include <cstddef>
#include <cstdint>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ozawa {

enum class Execution { serial, parallel };

inline int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

/// Runs body(i) for i in [0, count). Exceptions thrown inside the parallel
/// region are captured and the first one is rethrown after the loop.
template <class Body>
void parallel_for(std::size_t count, Body&& body, Execution exec = Execution::parallel) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(ozawa_parallel_for_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Number of i in [0, count) for which pred(i) is false.
template <class Pred>
std::size_t count_failures(std::size_t count, Pred&& pred, Execution exec = Execution::parallel) {
  std::size_t failures = 0;
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < count; ++i)
      if (!pred(i)) ++failures;
    return failures;
  }
  std::exception_ptr error;
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(dynamic) reduction(+ : failures)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      if (!pred(static_cast<std::size_t>(i))) ++failures;
    } catch (...) {
#pragma omp critical(ozawa_count_failures_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return failures;
}

}  // namespace ozawa
