#pragma once

#include <cstddef>
#include <functional>

namespace binpick {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Work is split into contiguous blocks; fn must write only
/// to slots owned by its own i so results do not depend on the thread
/// count. Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Resolves a requested thread count (0 = hardware concurrency, min 1).
int resolve_threads(int requested);

}  // namespace binpick
