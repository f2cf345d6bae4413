#include <algorithm>
#include <map>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "sim_internal.hpp"

namespace sdmnoc {

std::int64_t SimResult::injected() const {
  std::int64_t n = 0;
  for (const auto& f : flows) n += f.injected;
  return n;
}

std::int64_t SimResult::delivered() const { return static_cast<std::int64_t>(packets.size()); }

double SimResult::mean_latency() const {
  if (packets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : packets) sum += static_cast<double>(p.latency());
  return sum / static_cast<double>(packets.size());
}

RouterEvents SimResult::total_events() const {
  RouterEvents t;
  for (const auto& e : routers) {
    t.buffer_writes += e.buffer_writes;
    t.buffer_reads += e.buffer_reads;
    t.crosspoint_configurable += e.crosspoint_configurable;
    t.crosspoint_hardwired += e.crosspoint_hardwired;
    t.arbitrations += e.arbitrations;
    t.route_computes += e.route_computes;
  }
  return t;
}

namespace detail {

void finalize(SimResult& r, const Workload& w, std::int64_t undelivered) {
  std::stable_sort(r.packets.begin(), r.packets.end(), [](const PacketRecord& a, const PacketRecord& b) {
    return std::tie(a.flow_id, a.created) < std::tie(b.flow_id, b.created);
  });
  std::map<int, std::size_t> row;
  for (const auto& s : w.flows) {
    row[s.flow_id] = r.flows.size();
    FlowStats st;
    st.flow_id = s.flow_id;
    st.injected = static_cast<std::int64_t>(s.cycles.size());
    r.flows.push_back(st);
  }
  std::vector<double> sums(r.flows.size(), 0.0);
  for (const auto& p : r.packets) {
    const auto i = row.at(p.flow_id);
    auto& st = r.flows[i];
    ++st.delivered;
    sums[i] += static_cast<double>(p.latency());
    st.max_latency = std::max(st.max_latency, p.latency());
  }
  for (std::size_t i = 0; i < r.flows.size(); ++i) {
    if (r.flows[i].delivered > 0) r.flows[i].avg_latency = sums[i] / static_cast<double>(r.flows[i].delivered);
  }

  // Latency that keeps growing over the run means queues never drain.
  const std::int64_t q = r.horizon / 4;
  double early = 0.0, late = 0.0;
  std::int64_t n_early = 0, n_late = 0;
  for (const auto& p : r.packets) {
    if (p.created < q) {
      early += static_cast<double>(p.latency());
      ++n_early;
    } else if (p.created >= r.horizon - q) {
      late += static_cast<double>(p.latency());
      ++n_late;
    }
  }
  bool growing = false;
  if (n_early > 0 && n_late > 0) {
    early /= static_cast<double>(n_early);
    late /= static_cast<double>(n_late);
    growing = late > 2.0 * early + 8.0;
  }
  r.saturated = undelivered > 0 || growing;
}

}  // namespace detail

std::string render_sim_json(const SimResult& r) {
  using nlohmann::json;
  json flows = json::array();
  for (const auto& f : r.flows) {
    flows.push_back({{"flow", f.flow_id},
                     {"injected", f.injected},
                     {"delivered", f.delivered},
                     {"avg_latency", f.avg_latency},
                     {"max_latency", f.max_latency}});
  }
  json routers = json::array();
  for (std::size_t n = 0; n < r.routers.size(); ++n) {
    const auto& e = r.routers[n];
    routers.push_back({{"node", n},
                       {"buffer_writes", e.buffer_writes},
                       {"buffer_reads", e.buffer_reads},
                       {"crosspoint_configurable", e.crosspoint_configurable},
                       {"crosspoint_hardwired", e.crosspoint_hardwired},
                       {"arbitrations", e.arbitrations},
                       {"route_computes", e.route_computes}});
  }
  json doc{{"design", r.design},
           {"horizon", r.horizon},
           {"cycles_run", r.cycles_run},
           {"injected", r.injected()},
           {"delivered", r.delivered()},
           {"mean_latency", r.mean_latency()},
           {"saturated", r.saturated},
           {"link_bit_hops", r.link_bit_hops},
           {"multipath_chunks", r.multipath_chunks},
           {"simultaneity_violations", r.simultaneity_violations},
           {"flows", flows},
           {"routers", routers}};
  return doc.dump(1) + "\n";
}

std::string render_flow_csv(const SimResult& r) {
  std::string out = "flow_id,packets,avg_latency,max_latency\n";
  for (const auto& f : r.flows) {
    out += fmt::format("{},{},{:.4f},{}\n", f.flow_id, f.delivered, f.avg_latency, f.max_latency);
  }
  return out;
}

std::string render_link_csv(const SimResult& r) {
  std::string out = "link_id,unit_id,active_cycles\n";
  const auto u = static_cast<std::size_t>(r.units_per_link);
  for (std::size_t i = 0; i < r.unit_active.size(); ++i) {
    if (r.unit_active[i] == 0) continue;
    out += fmt::format("{},{},{}\n", i / u, i % u, r.unit_active[i]);
  }
  return out;
}

}  // namespace sdmnoc
