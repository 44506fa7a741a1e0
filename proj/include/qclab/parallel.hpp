#pragma once

#include <cstddef>
#include <functional>

namespace qclab {

/// Runs fn over [0,n) split into up to `threads` contiguous chunks. Chunks
/// must write to disjoint locations; results may not depend on the chunk
/// boundaries, so any thread count gives identical output.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace qclab
