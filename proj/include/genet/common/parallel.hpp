#pragma once

#include <cstddef>
#include <functional>

namespace genet {

/// Number of workers used when a caller passes jobs == 0.
std::size_t default_jobs();

/// Runs body(i) for i in [0, n) on up to `jobs` threads. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// outcome does not depend on the worker count. The first exception thrown
/// by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& body);

/// Process-wide worker count used by library loops that do not take an
/// explicit jobs argument. Defaults to 1.
void set_global_jobs(std::size_t jobs);
std::size_t global_jobs();

}  // namespace genet
