#pragma once

#include <cstddef>
#include <functional>

namespace bermudan {

// Worker count: BERMUDAN_WORKERS if set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs task(0..n_tasks-1) on up to `workers` threads. Tasks must write to
// disjoint outputs; the call returns after every task has finished and
// rethrows the first exception raised by any task.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& task,
                  std::size_t workers = worker_count());

}  // namespace bermudan
