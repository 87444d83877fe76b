#pragma once

#include <functional>

namespace clonedetect {

/// Worker budget: CLONEDETECT_THREADS when set to a positive value, else the
/// hardware concurrency (0 or unset means auto).
int worker_thread_count();

/// Fixed chunk width used by every data-parallel stage. Chunk boundaries —
/// not thread assignment — define any floating-point combination order, so
/// results are identical for every thread count.
inline constexpr long long kParallelChunk = 4096;

/// Runs fn(chunk_index, begin, end) over [0, count) split into kParallelChunk
/// slices, on up to worker_thread_count() threads. fn must only write to
/// locations owned by its slice.
void parallel_chunks(long long count,
                     const std::function<void(long long, long long, long long)>& fn);

}  // namespace clonedetect
