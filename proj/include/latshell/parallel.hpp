#pragma once

#include <cstdint>
#include <functional>

namespace latshell {

// Worker count resolution: explicit request > LATSHELL_WORKERS > hardware cores.
int resolve_workers(int requested);

// Runs chunk_fn(0..n_chunks-1), each chunk exactly once, across `workers`
// threads. Chunk boundaries are the caller's, so per-chunk outputs (and any
// in-order reduction over them) do not depend on the worker count.
void run_chunked(std::int64_t n_chunks, int workers,
                 const std::function<void(std::int64_t)>& chunk_fn);

} // namespace latshell
