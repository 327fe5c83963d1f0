// parallel.hpp - static-partition parallel loop with deterministic results.

#pragma once

#include <functional>

namespace gaussflow {

// Worker count: GAUSSFLOW_THREADS if set, else the hardware concurrency.
int worker_count();

// Calls body(i) for i in [0, n). Each index is processed exactly once by one
// worker; callers write into per-index slots and reduce sequentially, so the
// outcome does not depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace gaussflow
