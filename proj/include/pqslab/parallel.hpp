#pragma once

#include <cstddef>
#include <functional>

namespace pqslab {

/// Worker count: requested > 0 wins, then PQSLAB_THREADS, then the
/// hardware concurrency. Always >= 1.
int resolve_threads(int requested);

/// Process-wide default used when a call passes threads = 0.
void set_default_threads(int threads);
int default_threads();

/// Runs body(i) for i in [0, count). Indices are handed out dynamically;
/// callers write results into slot i so output order never depends on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace pqslab
