#pragma once

#include <cstddef>
#include <functional>

namespace sia {

// Worker count: SIAPPROX_THREADS if set to a positive integer, else the hardware
// concurrency (at least 1).
int thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, so any
// per-index output slots are written by exactly one thread and results do not
// depend on scheduling. The first exception thrown by fn is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sia
