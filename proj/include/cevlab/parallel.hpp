#pragma once

#include <cstddef>
#include <functional>

namespace cevlab {

/// Worker count: CEVLAB_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
[[nodiscard]] unsigned default_thread_count() noexcept;

struct ExecPolicy {
    unsigned threads = 0;  // 0 = default_thread_count()

    [[nodiscard]] unsigned resolved() const noexcept { return threads == 0 ? default_thread_count() : threads; }
};

/// Calls fn(i) for every i in [0, count), split into contiguous chunks over
/// the policy's worker threads. fn must only write to per-index slots; the
/// first exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, const ExecPolicy& policy, const std::function<void(std::size_t)>& fn);

}  // namespace cevlab
