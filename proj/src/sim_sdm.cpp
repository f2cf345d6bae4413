#include <deque>
#include <map>

#include <fmt/format.h>

#include "sim_internal.hpp"

namespace sdmnoc {

namespace {

struct Slice {
  int packet = -1;
  int chunk = 0;
};

struct FlowState {
  const FlowCircuit* circuit = nullptr;
  const FlowSchedule* schedule = nullptr;
  int hops = 0;
  int chunks = 0;  // per packet
  std::size_t next_arrival = 0;
  std::deque<int> queue;
  int current = -1;
  int sent = 0;
  std::vector<std::vector<Slice>> rings;  // [branch][cycle % hops]
  std::map<std::pair<int, int>, std::pair<std::int64_t, int>> landing;  // chunk -> (cycle, branches)
  std::vector<std::int64_t> created;
};

}  // namespace

SimResult simulate_sdm(const Platform& mesh, const CircuitPlan& plan, const Workload& w,
                       std::int64_t horizon, const SimOptions& opts) {
  SimResult r;
  r.design = "sdm";
  r.horizon = horizon;
  r.units_per_link = mesh.units();
  r.unit_active.assign(mesh.links().size() * static_cast<std::size_t>(mesh.units()), 0);
  r.routers.assign(mesh.num_nodes(), {});
  const int m = mesh.config().unit_width;

  std::vector<FlowState> flows;
  for (const auto& s : w.flows) {
    FlowState f;
    f.schedule = &s;
    f.circuit = plan.find(s.flow_id);
    if (!f.circuit || f.circuit->branches.empty()) {
      throw SimError(fmt::format("flow {} has no circuit", s.flow_id));
    }
    f.hops = f.circuit->hops();
    const int width_bits = f.circuit->units() * m;
    f.chunks = (w.packet_bits + width_bits - 1) / width_bits;
    f.rings.assign(f.circuit->branches.size(), std::vector<Slice>(f.hops));
    flows.push_back(std::move(f));
  }

  const std::int64_t limit = horizon * (1 + opts.drain_factor);
  std::int64_t in_flight = 0;
  std::int64_t c = 0;
  for (; c < limit; ++c) {
    if (c >= horizon && in_flight == 0) break;
    for (auto& f : flows) {
      const auto nb = static_cast<int>(f.rings.size());
      const auto slot = static_cast<std::size_t>(c % f.hops);
      for (int b = 0; b < nb; ++b) {
        Slice& s = f.rings[b][slot];
        if (s.packet < 0) continue;
        auto& land = f.landing[{s.packet, s.chunk}];
        if (land.second == 0) {
          land.first = c;
        } else if (land.first != c) {
          ++r.simultaneity_violations;
        }
        if (++land.second == nb) {
          if (nb > 1) ++r.multipath_chunks;
          if (s.chunk == f.chunks - 1) {
            r.packets.push_back({f.schedule->flow_id, f.created[s.packet], c, f.hops});
            --in_flight;
          }
          f.landing.erase({s.packet, s.chunk});
        }
        s = Slice{};
      }

      while (f.next_arrival < f.schedule->cycles.size() && f.schedule->cycles[f.next_arrival] == c) {
        f.queue.push_back(static_cast<int>(f.created.size()));
        f.created.push_back(c);
        ++f.next_arrival;
        ++in_flight;
      }
      if (f.current < 0 && !f.queue.empty()) {
        f.current = f.queue.front();
        f.queue.pop_front();
        f.sent = 0;
      }
      if (f.current < 0) continue;

      for (int b = 0; b < nb; ++b) {
        const auto& br = f.circuit->branches[b];
        f.rings[b][slot] = Slice{f.current, f.sent};
        for (int hop = 0; hop < br.hops(); ++hop) {
          for (int unit : br.units[hop]) {
            ++r.unit_active[static_cast<std::size_t>(br.links[hop]) * mesh.units() + unit];
          }
          if (b == 0) {
            // one input-register pass per chunk per hop, however it is sliced
            auto& ev = r.routers[br.nodes[hop + 1]];
            ++ev.buffer_writes;
            ++ev.buffer_reads;
          }
          r.link_bit_hops += static_cast<std::uint64_t>(br.width) * m;
        }
        for (const auto& x : br.crosspoints) {
          auto& ev = r.routers[x.node];
          if (x.kind == CrosspointKind::Hardwired) {
            ++ev.crosspoint_hardwired;
          } else {
            ++ev.crosspoint_configurable;
          }
        }
      }
      if (++f.sent == f.chunks) f.current = -1;
    }
  }
  r.cycles_run = c;
  detail::finalize(r, w, in_flight);
  return r;
}

std::vector<std::int64_t> sdm_closed_form(const std::vector<std::int64_t>& created, int packet_bits,
                                          int width_bits, int hops) {
  const std::int64_t s = (packet_bits + width_bits - 1) / width_bits;
  std::vector<std::int64_t> out;
  std::int64_t free_at = 0;
  for (std::int64_t t : created) {
    const std::int64_t start = std::max(t, free_at);
    free_at = start + s;
    out.push_back((start - t) + s + hops - 1);
  }
  return out;
}

}  // namespace sdmnoc
