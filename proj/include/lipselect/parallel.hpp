#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lipselect {

/// Worker count from LIPSELECT_THREADS; 0 or unset means sequential.
std::size_t worker_count();

/// Runs body(i) for i in [0, n). Results must be written to per-index slots
/// so the outcome is independent of scheduling. If several indices throw,
/// the exception of the smallest index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lipselect
