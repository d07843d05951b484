#pragma once

#include <functional>

namespace perifem {

/// Set the worker count used by parallel_for. 1 disables threading.
void set_threads(int n);
int get_threads();

/// Chunked parallel loop over [0, n). The range is always split into the
/// same fixed set of contiguous chunks regardless of the worker count, and
/// each chunk is processed by exactly one worker, so per-index results are
/// bitwise reproducible for any thread count. Reductions that must be
/// deterministic should accumulate per chunk_id and sum chunk results in
/// order afterwards.
void parallel_for(int n, const std::function<void(int chunk_id, int begin, int end)>& body);

/// Number of chunks parallel_for uses for a range of size n.
int chunk_count(int n);

} // namespace perifem
