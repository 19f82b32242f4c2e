#pragma once

#include <cstddef>
#include <cstdint>

namespace nlpricing {

// Execution policy for the data-parallel kernels (grid sweeps, batteries).
// Every kernel has identical output under both policies: iterations are
// independent and each writes its own slot.
enum class Exec { serial, parallel };

template <typename Fn>
void parallel_for(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      fn(static_cast<std::size_t>(i));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) fn(i);
  }
}

}  // namespace nlpricing
