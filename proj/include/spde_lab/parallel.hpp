#pragma once

#include <cstddef>
#include <functional>

namespace spde_lab {

/// Worker count: SPDE_LAB_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Indices
/// are claimed dynamically, so callers must write results by index. If any
/// calls throw, the exception of the smallest failing index is rethrown
/// after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace spde_lab
