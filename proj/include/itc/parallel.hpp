#pragma once

namespace itc {

/// Worker count for internal loops: ITC_THREADS if set to a positive
/// integer, otherwise the OpenMP default.
int worker_count();

}  // namespace itc
