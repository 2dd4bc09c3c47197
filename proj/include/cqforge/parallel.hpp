#pragma once

#include <cstddef>
#include <functional>

namespace cqforge {

// Runs fn(0..n-1) across up to `workers` threads. Work items must be
// independent; callers get determinism by writing into per-index slots.
// The first exception thrown by any item is rethrown after all threads join.
void parallel_for(size_t n, size_t workers, const std::function<void(size_t)>& fn);

}  // namespace cqforge
