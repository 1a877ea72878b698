#pragma once

#include <cstdint>
#include <functional>

namespace wassval {

// Runs body(i) for i in [0, n) across `threads` workers (block partition).
// threads <= 1 runs inline. Bodies must be independent; determinism is the
// caller's job (write to slot i, reduce in index order afterwards).
void parallel_for(std::int64_t n, int threads,
                  const std::function<void(std::int64_t)>& body);

int hardware_threads();

}  // namespace wassval
