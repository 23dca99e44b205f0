#pragma once

#include <cstddef>
#include <functional>

namespace chichaos {

/// Number of workers used when a caller passes workers <= 0.
int default_workers();

/// Runs fn(0..n-1) across a pool of workers. Tasks are claimed through an
/// atomic counter; any exception escaping fn is rethrown on the caller after
/// all workers join. Results must be written to per-index slots, which keeps
/// output independent of the worker count.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace chichaos
