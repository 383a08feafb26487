#pragma once

#include <cstdint>
#include <functional>

namespace acbe {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). Work is assigned round-robin by index, so results stored
/// per index are schedule-independent. The first exception thrown by any
/// worker is rethrown after all workers join.
void parallel_for(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn);

/// The worker count parallel_for would use.
int resolve_threads(int threads);

}  // namespace acbe
