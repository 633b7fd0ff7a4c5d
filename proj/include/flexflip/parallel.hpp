#pragma once

#include <cstddef>
#include <functional>

namespace flexflip {

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed from a shared counter; callers write results by index, so the
/// output never depends on the schedule. threads <= 1 runs inline. The first
/// exception thrown by any item is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

/// Worker count for a `--threads 0` request (hardware concurrency, at least 1).
int default_thread_count();

}  // namespace flexflip
