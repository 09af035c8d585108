#pragma once

#include <cstddef>
#include <functional>

namespace quantfix {

/// Worker count: QUANTFIX_THREADS if set and positive, otherwise the
/// hardware concurrency (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n), split into contiguous chunks across
/// worker_count() threads. The first exception thrown by any chunk is
/// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace quantfix
