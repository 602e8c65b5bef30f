#pragma once

#include <cstddef>
#include <functional>

namespace phaselens {

/// Worker count: PHASELENS_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
std::size_t worker_count();

/// Splits [0, total) into contiguous chunks and calls `body(chunk, begin, end)` for
/// each, on up to worker_count() threads. Callers reduce per-chunk results in
/// chunk order so the outcome does not depend on scheduling.
void parallel_chunks(std::size_t total, std::size_t chunk_count,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

}  // namespace phaselens
