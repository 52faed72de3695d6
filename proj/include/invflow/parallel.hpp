#pragma once

#include <cstddef>
#include <functional>

namespace invflow {

/// Worker cap from INVARIANT_FLOW_THREADS, else hardware concurrency (>= 1).
std::size_t worker_count();

/// Splits [0, n) into contiguous chunks and calls body(chunk_index, begin, end)
/// on up to worker_count() threads. Chunk boundaries depend only on n and
/// the chunk count, so per-chunk reductions merged in index order are
/// deterministic regardless of scheduling.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace invflow
