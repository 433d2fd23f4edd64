#pragma once

#include <cstddef>
#include <functional>

namespace tada {

// TADA_WORKERS when set to a positive integer, otherwise hardware concurrency (at least 1).
unsigned default_worker_count();

// Runs body(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any body is rethrown after all threads finish.
void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace tada
