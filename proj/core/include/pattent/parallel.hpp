// Minimal fork-join loop used by the parameter sweeps.
#pragma once

#include <cstddef>
#include <functional>

namespace pattent {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. Each index runs
// exactly once; the first exception thrown by fn is rethrown after all
// workers finish.
void parallel_for(std::size_t count, unsigned jobs, const std::function<void(std::size_t)>& fn);

// PATTENT_JOBS if set to a positive integer, else 1.
unsigned default_jobs();

}  // namespace pattent
