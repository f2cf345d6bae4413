#include <array>
#include <deque>

#include <fmt/format.h>

#include "sim_internal.hpp"

namespace sdmnoc {

namespace {

struct Flit {
  int packet = 0;
  bool head = false;
  bool tail = false;
  std::int64_t ready = 0;  // first cycle it may bid for the switch
};

struct InFlight {
  std::int64_t arrival = 0;
  int router = 0;
  Port in_port = Port::Local;
  Flit flit;
};

struct CreditReturn {
  std::int64_t arrival = 0;
  int router = 0;
  Port out_port = Port::Local;
};

struct PacketInfo {
  int flow = 0;
  int src = 0;
  int dst = 0;
  int hops = 0;
  std::int64_t created = 0;
};

struct Router {
  std::array<std::deque<Flit>, kNumPorts> in;
  std::array<int, kNumPorts> credits{};
  std::array<int, kNumPorts> held_by{};  // input port holding each output, -1 if free
  std::array<int, kNumPorts> rr{};
};

int idx(Port p) { return static_cast<int>(p); }

Port xy_route(const Platform& mesh, int at, int dst) {
  const Coord a = mesh.coord(at), b = mesh.coord(dst);
  if (b.x > a.x) return Port::East;
  if (b.x < a.x) return Port::West;
  if (b.y > a.y) return Port::South;
  if (b.y < a.y) return Port::North;
  return Port::Local;
}

}  // namespace

std::int64_t wormhole_zero_load(int hops, int flits, const WormholeConfig& cfg) {
  return static_cast<std::int64_t>(hops) * (cfg.router_stages + cfg.link_cycles) + flits - 1;
}

SimResult simulate_wormhole(const Platform& mesh, const Mapping& p, const TaskGraph& g,
                            const Workload& w, std::int64_t horizon, const WormholeConfig& cfg,
                            const SimOptions& opts) {
  const int n_bits = mesh.config().link_width;
  if (w.packet_bits % n_bits != 0) {
    throw SimError(fmt::format("packet of {} bits is not a whole number of {}-bit flits",
                               w.packet_bits, n_bits));
  }
  const int flits = w.packet_bits / n_bits;
  const auto u = static_cast<std::uint64_t>(mesh.units());
  const int n_nodes = mesh.num_nodes();
  // switch allocation in the first router stage, arrival after the link
  const int pipe = cfg.router_stages - 1 + cfg.link_cycles;

  SimResult r;
  r.design = "wormhole";
  r.horizon = horizon;
  r.units_per_link = mesh.units();
  r.unit_active.assign(mesh.links().size() * u, 0);
  r.routers.assign(n_nodes, {});

  std::vector<Router> routers(n_nodes);
  for (int n = 0; n < n_nodes; ++n) {
    for (Port o : kMeshPorts) routers[n].credits[idx(o)] = mesh.has_port(n, o) ? cfg.buffer_depth : 0;
    routers[n].held_by.fill(-1);
  }

  // All packets, created in cycle order, flow id breaking ties.
  std::vector<PacketInfo> packets;
  {
    std::vector<std::size_t> next(w.flows.size(), 0);
    while (true) {
      int pick = -1;
      for (std::size_t f = 0; f < w.flows.size(); ++f) {
        const auto& cyc = w.flows[f].cycles;
        if (next[f] >= cyc.size()) continue;
        if (pick < 0 || cyc[next[f]] < w.flows[pick].cycles[next[pick]]) pick = static_cast<int>(f);
      }
      if (pick < 0) break;
      const auto& fl = g.flows.at(w.flows[pick].flow_id);
      PacketInfo info;
      info.flow = fl.id;
      info.src = p.node_of_task.at(fl.src);
      info.dst = p.node_of_task.at(fl.dst);
      info.hops = manhattan_dist(mesh.coord(info.src), mesh.coord(info.dst));
      info.created = w.flows[pick].cycles[next[pick]++];
      packets.push_back(info);
    }
  }

  std::vector<std::deque<int>> ni(n_nodes);  // packets waiting at each source
  std::vector<int> ni_sent(n_nodes, 0);      // flits of the front packet already injected
  std::deque<InFlight> wires;
  std::deque<CreditReturn> credits;
  std::size_t next_packet = 0;
  std::int64_t in_flight = 0;

  const std::int64_t limit = horizon * (1 + opts.drain_factor);
  std::int64_t c = 0;
  for (; c < limit; ++c) {
    if (c >= horizon && in_flight == 0) break;

    while (!wires.empty() && wires.front().arrival == c) {
      const InFlight f = wires.front();
      wires.pop_front();
      auto& ev = r.routers[f.router];
      ev.buffer_writes += u;
      const auto& info = packets[f.flit.packet];
      if (f.router == info.dst) {
        // ejection: through the buffer and crossbar to the local port
        ev.buffer_reads += u;
        ev.crosspoint_configurable += u;
        credits.push_back({c + cfg.link_cycles, mesh.neighbor(f.router, f.in_port), opposite(f.in_port)});
        if (f.flit.tail) {
          r.packets.push_back({info.flow, info.created, c, info.hops});
          --in_flight;
        }
      } else {
        Flit fl = f.flit;
        fl.ready = c + 1;
        routers[f.router].in[idx(f.in_port)].push_back(fl);
      }
    }

    while (!credits.empty() && credits.front().arrival == c) {
      ++routers[credits.front().router].credits[idx(credits.front().out_port)];
      credits.pop_front();
    }

    for (int n = 0; n < n_nodes; ++n) {
      auto& rt = routers[n];
      std::array<bool, kNumPorts> sent{};  // one flit per input per cycle
      for (Port o : kMeshPorts) {
        const int oi = idx(o);
        if (!mesh.has_port(n, o) || rt.credits[oi] == 0) continue;
        int grant = -1;
        if (rt.held_by[oi] >= 0) {
          const auto& q = rt.in[rt.held_by[oi]];
          if (!q.empty() && q.front().ready <= c && !sent[rt.held_by[oi]]) grant = rt.held_by[oi];
        } else {
          for (int k = 1; k <= kNumPorts; ++k) {
            const int i = (rt.rr[oi] + k) % kNumPorts;
            const auto& q = rt.in[i];
            if (sent[i] || q.empty() || q.front().ready > c || !q.front().head) continue;
            if (xy_route(mesh, n, packets[q.front().packet].dst) != o) continue;
            grant = i;
            break;
          }
          if (grant >= 0) ++r.routers[n].arbitrations;
        }
        if (grant < 0) continue;

        sent[grant] = true;
        Flit fl = rt.in[grant].front();
        rt.in[grant].pop_front();
        --rt.credits[oi];
        auto& ev = r.routers[n];
        ev.buffer_reads += u;
        ev.crosspoint_configurable += u;
        if (fl.head) {
          ++ev.route_computes;
          rt.held_by[oi] = grant;
          rt.rr[oi] = grant;
        }
        if (fl.tail) rt.held_by[oi] = -1;
        const int link = mesh.link_from(n, o);
        for (std::uint64_t unit = 0; unit < u; ++unit) ++r.unit_active[link * u + unit];
        r.link_bit_hops += static_cast<std::uint64_t>(n_bits);
        wires.push_back({c + pipe, mesh.neighbor(n, o), opposite(o), fl});
        if (static_cast<Port>(grant) != Port::Local) {
          credits.push_back({c + cfg.link_cycles, mesh.neighbor(n, static_cast<Port>(grant)),
                             opposite(static_cast<Port>(grant))});
        }
      }
    }

    while (next_packet < packets.size() && packets[next_packet].created == c) {
      ni[packets[next_packet].src].push_back(static_cast<int>(next_packet));
      ++next_packet;
      ++in_flight;
    }
    for (int n = 0; n < n_nodes; ++n) {
      auto& local = routers[n].in[idx(Port::Local)];
      if (ni[n].empty() || static_cast<int>(local.size()) >= cfg.buffer_depth) continue;
      const int pk = ni[n].front();
      Flit fl;
      fl.packet = pk;
      fl.head = ni_sent[n] == 0;
      fl.tail = ni_sent[n] == flits - 1;
      fl.ready = c + 1;
      local.push_back(fl);
      r.routers[n].buffer_writes += u;
      if (++ni_sent[n] == flits) {
        ni_sent[n] = 0;
        ni[n].pop_front();
      }
    }
  }
  r.cycles_run = c;
  detail::finalize(r, w, in_flight);
  return r;
}

}  // namespace sdmnoc
