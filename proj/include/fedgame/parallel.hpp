#pragma once

#include <cstddef>
#include <functional>

namespace fedgame {

// Runs fn(0), ..., fn(n-1) on at most `jobs` worker threads. Each task must
// write only to its own per-index slot; results are then independent of
// scheduling, and output produced from them is byte-identical for any job
// count. If several tasks throw, the exception of the lowest index is
// rethrown.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace fedgame
