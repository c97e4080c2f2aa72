#pragma once

#include <cstddef>
#include <functional>

namespace delayfield {

/// Worker count: DELAYFIELD_THREADS if set (>=1), else hardware concurrency.
int thread_budget();

/// Runs fn(begin, end) over a static partition of [0, n); blocks until done.
/// Falls back to inline execution for one worker or tiny n. Results must not
/// depend on partitioning (callers pre-draw noise from per-item substreams).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace delayfield
