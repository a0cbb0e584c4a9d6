#pragma once

#include <functional>

namespace platekit {

// Number of worker threads: the PLATEKIT_THREADS environment variable when it
// is set to a positive value, otherwise the hardware concurrency (at least 1).
int worker_count();

// Runs fn(i) for every i in [0, n), possibly on several threads. Results are
// deterministic as long as fn(i) writes only to its own preallocated slot.
// Exceptions thrown by fn are collected and the first one is rethrown.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace platekit
