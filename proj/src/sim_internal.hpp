#pragma once

#include "sdmnoc/sim.hpp"

namespace sdmnoc::detail {

/// Fills per-flow statistics and the saturation flag from the packet log.
void finalize(SimResult& r, const Workload& w, std::int64_t undelivered);

}  // namespace sdmnoc::detail
