#pragma once

#include <functional>

#include "splitreg/types.hpp"

namespace splitreg {

/// Number of worker threads to use. The SPLITREG_THREADS environment
/// variable, when set, overrides `requested`; a `requested` (or override)
/// value of 0 means "all hardware threads". Always returns >= 1. Throws
/// InvalidInput on a negative request or an unparseable override.
int resolve_thread_count(int requested);

/// Runs body(i) for i in [0, count) across up to `threads` workers. Tasks are
/// claimed from a shared counter, so the caller must make outputs independent
/// (e.g. one preassigned slot per index); results are then identical to the
/// serial order regardless of scheduling. The first exception thrown by any
/// task is rethrown after all workers stop.
void parallel_for(Index count, int threads, const std::function<void(Index)>& body);

}  // namespace splitreg
