#pragma once

#include <cstddef>
#include <functional>

namespace canham {

// Worker count: CANHAM_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int thread_count();

// Runs body(i) for i in [0, n). Each index is executed exactly once; callers
// write results into per-index slots and reduce them in index order, which
// keeps every result independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace canham
