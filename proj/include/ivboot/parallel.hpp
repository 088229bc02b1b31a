#pragma once

#include <cstddef>
#include <functional>

namespace ivboot {

// Worker count: IVBOOT_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, count) on up to `threads` workers (0 means
// worker_count()). Work items must write only to their own slots. If any
// item throws, the exception of the smallest failing index is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads = 0);

} // namespace ivboot
