#include <algorithm>

#include <fmt/format.h>

#include "sdmnoc/rng.hpp"
#include "sdmnoc/sim.hpp"

namespace sdmnoc {

Workload generate_workload(const TaskGraph& g, const MeshConfig& cfg, std::int64_t horizon,
                           std::uint64_t seed, const WorkloadOptions& opts) {
  if (horizon <= 0) throw std::invalid_argument("horizon must be positive");
  if (opts.packet_bits <= 0) throw std::invalid_argument("packet size must be positive");
  Workload w;
  w.packet_bits = opts.packet_bits;
  Rng rng(seed);
  const auto bits_times_f =
      static_cast<unsigned __int128>(opts.packet_bits) * static_cast<unsigned __int128>(cfg.frequency_hz);
  const std::int64_t min_period = (opts.packet_bits + cfg.link_width - 1) / cfg.link_width;
  for (const auto& f : g.flows) {
    FlowSchedule s;
    s.flow_id = f.id;
    const auto d = static_cast<unsigned __int128>(f.demand_bps);
    s.period = std::max<std::int64_t>(1, static_cast<std::int64_t>((2 * bits_times_f + d) / (2 * d)));
    if (s.period < min_period) {
      w.warnings.push_back(fmt::format("flow {} needs a packet every {} cycles, serialization takes {}",
                                       f.id, s.period, min_period));
    }
    s.phase = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(s.period)));
    if (opts.mode == InjectionMode::Periodic) {
      for (std::int64_t t = s.phase; t < horizon; t += s.period) s.cycles.push_back(t);
    } else {
      const double p = 1.0 / static_cast<double>(s.period);
      for (std::int64_t t = 0; t < horizon; ++t) {
        if (rng.unit() < p) s.cycles.push_back(t);
      }
    }
    w.flows.push_back(std::move(s));
  }
  return w;
}

}  // namespace sdmnoc
