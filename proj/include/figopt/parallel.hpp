#pragma once

#include <cstddef>
#include <functional>

namespace figopt {

// Worker count: hardware concurrency, capped by the FIGOPT_THREADS
// environment variable when it is set to a positive integer.
unsigned worker_count();

// Calls body(i) for every i in [0, count). Each index is handled exactly
// once; the order of calls across workers is unspecified, so bodies must
// only write to per-index state. The first exception thrown by a body is
// rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace figopt
