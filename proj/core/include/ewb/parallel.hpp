#pragma once

#include <cstddef>
#include <functional>

namespace ewb {

// Worker count: WORKBENCH_THREADS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Work is distributed over at most worker_count()
// threads; callers write results into slot i so output never depends on
// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ewb
