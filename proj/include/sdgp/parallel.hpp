#pragma once

#include <cstddef>
#include <functional>

namespace sdgp {

/// Worker cap for parallel_for. Defaults to the hardware concurrency.
int thread_count();
void set_thread_count(int n);

/// Runs body(begin, end) over fixed chunks of [0, n). Chunk boundaries depend
/// only on n and chunk, never on the worker count, so callers that write
/// per-index results get identical output for any number of threads.
/// The first exception thrown by a chunk is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t chunk,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace sdgp
