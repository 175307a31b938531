// parallel.hpp — Index-ordered parallel loops capped by SPINFLOP_THREADS

#pragma once

#include <cstddef>
#include <functional>

namespace spinflop {

/// Worker count: SPINFLOP_THREADS when set to a positive integer, else hardware concurrency.
std::size_t worker_count();

/// Calls body(i) for i in [0, n). Results must be written by index; the first exception
/// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace spinflop
