#pragma once

#include <cstddef>
#include <functional>

namespace rss_sentry {

// Number of workers actually used for `requested` (<=0 means all hardware
// threads, subject to the RSS_SENTRY_THREADS environment fallback).
int resolve_thread_count(int requested);

// Run fn(i) for i in [0, n) across workers. Chunked statically so results
// written by index are deterministic regardless of worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace rss_sentry
