#pragma once

#include <cstddef>
#include <functional>

namespace birddet {

// Run fn(0..n-1) on up to `jobs` threads. Callers must write results into
// per-index slots; reductions happen after the join, so thread count and
// scheduling never affect output.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace birddet
