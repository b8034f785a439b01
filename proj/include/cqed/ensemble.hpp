// Serial / OpenMP execution of independent work items.
//
// Every item is deterministic in its index (counter-based noise streams),
// so the parallel path produces bit-identical results to the serial one;
// the serial path is kept as the reference for tests and as the baseline
// for the benchmark target.

#pragma once

#include <cstddef>

namespace cqed {

enum class RunMode { serial, parallel };

template <typename F>
void for_each_index(std::size_t n, RunMode mode, F&& f) {
  if (mode == RunMode::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      f(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      f(i);
    }
  }
}

}  // namespace cqed
