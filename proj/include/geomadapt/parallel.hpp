#pragma once

#include <cstddef>
#include <exception>
#include <mutex>

namespace geomadapt {

/// Serial execution is the reference path; parallel runs the same body
/// under an OpenMP worksharing loop. Bodies must write only to slots
/// owned by their index, so both paths produce identical results.
enum class Execution { serial, parallel };

/// Calls body(i) for i in [0, n). The first exception thrown by any
/// iteration is rethrown after the loop completes.
template <class Body>
void for_each_index(std::size_t n, Execution exec, Body&& body) {
  if (exec == Execution::serial) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Number of OpenMP worker threads available to parallel loops.
int worker_threads();

}  // namespace geomadapt
