#pragma once

#include <cstddef>
#include <functional>

namespace apxgrp {

// Worker count used by the bulk set kernels.  0 means "hardware concurrency".
void set_thread_count(unsigned n);
unsigned thread_count();

// Splits [0, n) into one contiguous segment per worker and runs fn(begin,
// end, segment_index) on each.  Callers own determinism: per-segment outputs
// must be combined in segment order or with an order-independent reduction.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t, unsigned)>& fn);

}  // namespace apxgrp
