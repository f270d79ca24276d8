#pragma once

#include <cstddef>
#include <functional>

namespace aniso {

// Worker count: ANISO_THREADS (clamped to >=1) if set, else hardware
// concurrency, else 1. Read once per process.
unsigned thread_count();

// Runs fn(i) for i in [0, n). Work is handed out by an atomic counter, so fn
// must be independent per index; results must not depend on execution order.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace aniso
