#pragma once

#include <cstddef>
#include <functional>

namespace lumen {

/// Worker count: hardware concurrency, capped by the LUMEN_THREADS
/// environment variable when it holds a positive integer.
std::size_t worker_count();

/// Run body(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on n, so callers that write per-index results and reduce them
/// serially get thread-count independent output.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

} // namespace lumen
