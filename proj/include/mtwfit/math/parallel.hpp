#ifndef MTWFIT_MATH_PARALLEL_HPP
#define MTWFIT_MATH_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace mtwfit::math {

/// Worker count: explicit argument > MTWFIT_THREADS env > hardware.
int resolve_workers(int requested);

/// Runs task(i) for i in [0, n) across workers. Tasks must write to
/// disjoint state; results are then independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task,
                  int workers = 0);

/// Splits [0, n) into contiguous chunks and runs chunk_task(begin, end).
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& chunk_task,
                     int workers = 0);

} // namespace mtwfit::math

#endif
