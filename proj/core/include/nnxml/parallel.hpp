#pragma once

#include <cstddef>
#include <functional>

namespace nnxml {

/// Number of worker threads used by row-parallel kernels. Defaults to the
/// hardware concurrency. Results never depend on this value.
std::size_t num_threads();
void set_num_threads(std::size_t n);

/// Calls body(begin, end) on disjoint contiguous row ranges covering [0, n).
/// Each row is handled by exactly one call; callers must only write to
/// per-row outputs so the split cannot influence results.
void parallel_for_rows(std::size_t n,
                       const std::function<void(std::size_t, std::size_t)>& body);

/// Sum of row_value(i) for i in [0, n), reduced sequentially in row order
/// after the per-row values have been computed in parallel.
double deterministic_row_sum(std::size_t n,
                             const std::function<double(std::size_t)>& row_value);

}  // namespace nnxml
