#pragma once

// Element-parallel kernel evaluation with deterministic accumulation: kernels
// write into disjoint preallocated slots, callers accumulate serially in index
// order, so results are bit-identical at any thread count.

#include <functional>

namespace velast {

// Thread cap from SOLVER_THREADS (0 or unset means hardware concurrency).
int solver_threads();

// Runs body(i) for i in [0, n) across the configured number of threads.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace velast
