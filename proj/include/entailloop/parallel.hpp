#pragma once

#include <cstddef>
#include <functional>

namespace entailloop {

/// Worker cap from ENTAILLOOP_THREADS; unset or 0 means hardware concurrency.
std::size_t worker_count();

/// Runs fn(0..n-1) across up to worker_count() threads. Each index runs
/// exactly once; callers write results into per-index slots so output order
/// never depends on scheduling. The exception of the lowest failing index is
/// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace entailloop
