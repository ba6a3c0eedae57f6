#ifndef DYADINT_PARALLEL_HPP
#define DYADINT_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace dyadint {

// Runs body(begin, end) over contiguous chunks of [0, n) on up to `threads`
// threads. If several chunks throw, the exception of the lowest chunk wins,
// so failures are reported identically for every thread count.
void parallel_chunks(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body);

// Threads requested through DYADINT_THREADS, or `fallback`.
unsigned threads_from_env(unsigned fallback = 1);

} // namespace dyadint

#endif
