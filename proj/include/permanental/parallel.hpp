#pragma once

#include <functional>

namespace perm {

/// Worker count from PERM_WORKERS, or 1 when unset or invalid.
int default_workers();

/// Run task(i) for i in [0, count) on up to `workers` threads.
///
/// Tasks write to their own output slots, so results never depend on the
/// worker count. The first exception thrown by any task is rethrown.
void parallel_for(long count, int workers, const std::function<void(long)>& task);

}  // namespace perm
