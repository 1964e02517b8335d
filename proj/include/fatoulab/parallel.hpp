#pragma once

#include <cstddef>
#include <functional>

namespace fatoulab {

/// Worker count: FATOULAB_THREADS if set and positive, otherwise the
/// hardware concurrency (0 = auto).
unsigned worker_count();

/// Calls body(i) for i in [0, n). Work is split into contiguous blocks; each
/// index is handled exactly once, so writing to slot i keeps results
/// independent of scheduling. The first exception thrown (lowest index among
/// failing blocks) is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace fatoulab
