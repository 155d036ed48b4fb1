// Per-item parallel loops. Every batch kernel in turnkit takes an
// Execution argument: kParallel runs the OpenMP loop, kSerial runs the
// plain reference loop. Both write results into per-index slots, so
// output order never depends on scheduling.
#ifndef TURNKIT_PARALLEL_H_
#define TURNKIT_PARALLEL_H_

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace turnkit {

enum class Execution { kSerial, kParallel };

inline void SetThreadCount(int n) {
  if (n > 0) omp_set_num_threads(n);
}

inline int ThreadCount() { return omp_get_max_threads(); }

// Calls fn(i) for i in [0, n). Exceptions are captured per index; the one
// with the lowest index is rethrown after the loop.
template <class Fn>
void ForEachIndex(std::size_t n, Execution exec, Fn &&fn) {
  if (exec == Execution::kSerial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < count; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto &e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// out[i] = fn(i).
template <class T, class Fn>
std::vector<T> MapIndex(std::size_t n, Execution exec, Fn &&fn) {
  std::vector<T> out(n);
  ForEachIndex(n, exec, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace turnkit

#endif  // TURNKIT_PARALLEL_H_
