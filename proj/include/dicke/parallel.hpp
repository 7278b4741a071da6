#pragma once

#include <cstddef>
#include <functional>

namespace dicke {

/// Worker count: DICKE_THREADS if set and positive, otherwise the hardware
/// concurrency (at least 1).
int default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers (<= 0: default).
/// Work is handed out by index, so results must not depend on which worker
/// ran them. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace dicke
