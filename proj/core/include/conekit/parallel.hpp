#pragma once

#include <cstddef>
#include <functional>

namespace conekit {

/// Worker count: hardware concurrency capped by CONEKIT_THREADS when set.
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Exceptions
/// from any task are rethrown (the one with the lowest index wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace conekit
