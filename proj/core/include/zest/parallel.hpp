#pragma once

#include <cstddef>
#include <functional>

namespace zest {

// Logical CPU count, at least 1.
std::size_t default_thread_count();

// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = default count).
// Indices are handed out dynamically; the first exception thrown by any
// worker is rethrown on the calling thread after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace zest
