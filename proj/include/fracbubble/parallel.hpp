#pragma once

#include <cstddef>
#include <functional>

namespace fb {

/// Number of worker threads used by internal loops. Defaults to 1.
void set_worker_count(int n);
int worker_count();

/// Runs body(i) for i in [0, n) split into contiguous blocks, one per worker.
/// Each index is processed exactly once; callers keep any reduction
/// order-independent of the partition (per-index partials summed serially).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fb
