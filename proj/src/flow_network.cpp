#include "sdmnoc/flow_network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace sdmnoc {

UnitDemand compute_unit_demand(const Flow& f, const MeshConfig& cfg) {
  const std::uint64_t ub = unit_bandwidth(cfg);
  const auto d = static_cast<std::uint64_t>(f.demand_bps);
  const std::uint64_t units = d / ub + (d % ub != 0 ? 1 : 0);
  constexpr std::uint64_t kCap = std::numeric_limits<int>::max() / 2;
  return {f.id, static_cast<int>(std::min(units, kCap))};
}

std::vector<UnitDemand> compute_unit_demands(const TaskGraph& g, const MeshConfig& cfg) {
  std::vector<UnitDemand> out;
  out.reserve(g.flows.size());
  for (const auto& f : g.flows) out.push_back(compute_unit_demand(f, cfg));
  return out;
}

bool Commodity::in_rectangle(Coord c) const {
  return c.x >= std::min(src_xy.x, dst_xy.x) && c.x <= std::max(src_xy.x, dst_xy.x) &&
         c.y >= std::min(src_xy.y, dst_xy.y) && c.y <= std::max(src_xy.y, dst_xy.y);
}

namespace {

bool heads_toward_sink(const Commodity& c, Port out) {
  switch (out) {
    case Port::East: return c.dx() > 0;
    case Port::West: return c.dx() < 0;
    case Port::South: return c.dy() > 0;
    case Port::North: return c.dy() < 0;
    case Port::Local: return false;
  }
  return false;
}

}  // namespace

FlowNetwork::FlowNetwork(const Platform& mesh, std::vector<Arc> arcs,
                         std::vector<Commodity> commodities, ArcCosts costs)
    : mesh_(&mesh), arcs_(std::move(arcs)), commodities_(std::move(commodities)), costs_(costs) {
  if (!(costs_.hardwired > 0 && costs_.hardwired < costs_.regular)) {
    throw std::invalid_argument("arc costs must satisfy 0 < hardwired < regular");
  }
  admissible_.resize(commodities_.size());
  for (std::size_t k = 0; k < commodities_.size(); ++k) {
    for (int a = 0; a < num_arcs(); ++a) {
      if (admissible(static_cast<int>(k), a)) admissible_[k].push_back(a);
    }
  }
}

bool FlowNetwork::admissible(int commodity, int arc) const {
  const auto& c = commodities_[commodity];
  const auto& a = arcs_[arc];
  if (a.capacity <= 0) return false;
  const auto& link = mesh_->links()[a.link];
  if (!c.in_rectangle(mesh_->coord(link.from)) || !c.in_rectangle(mesh_->coord(link.to))) {
    return false;
  }
  if (!heads_toward_sink(c, link.out_port)) return false;
  return a.kind == ArcKind::Regular || c.straight();
}

std::vector<int> FlowNetwork::straight_path(int commodity) const {
  const auto& c = commodities_[commodity];
  std::vector<int> links;
  Coord at = c.src_xy;
  const int sx = (c.dx() > 0) - (c.dx() < 0);
  const int sy = (c.dy() > 0) - (c.dy() < 0);
  while (at != c.dst_xy) {
    Coord next{at.x + sx, at.y + sy};
    links.push_back(mesh_->link_between(mesh_->node(at), mesh_->node(next)));
    at = next;
  }
  return links;
}

FlowNetwork build_flow_network(const Platform& mesh, const Mapping& p, const TaskGraph& g,
                               std::span<const UnitDemand> demands, ArcCosts costs) {
  const int h = mesh.hardwired_units();
  const int u = mesh.units();
  std::vector<Arc> arcs;
  arcs.reserve(mesh.links().size() * 2);
  for (const auto& l : mesh.links()) {
    arcs.push_back(Arc{l.id, ArcKind::Regular, l.from, l.to, u - h, costs.regular});
    arcs.push_back(Arc{l.id, ArcKind::Hardwired, l.from, l.to, h, costs.hardwired});
  }
  std::vector<Commodity> commodities;
  commodities.reserve(demands.size());
  for (const auto& d : demands) {
    const auto& f = g.flows.at(d.flow_id);
    Commodity c;
    c.flow_id = f.id;
    c.source = p.node_of_task.at(f.src);
    c.sink = p.node_of_task.at(f.dst);
    c.demand = d.units;
    c.src_xy = mesh.coord(c.source);
    c.dst_xy = mesh.coord(c.sink);
    commodities.push_back(c);
  }
  return FlowNetwork(mesh, std::move(arcs), std::move(commodities), costs);
}

Allocation Allocation::empty(const FlowNetwork& net) {
  Allocation a;
  a.units.assign(net.num_commodities(), std::vector<int>(net.num_arcs(), 0));
  return a;
}

std::vector<int> Allocation::arc_loads() const {
  std::vector<int> loads(units.empty() ? 0 : units.front().size(), 0);
  for (const auto& row : units) {
    for (std::size_t a = 0; a < row.size(); ++a) loads[a] += row[a];
  }
  return loads;
}

std::int64_t allocation_cost(const FlowNetwork& net, const Allocation& a) {
  std::int64_t cost = 0;
  for (const auto& row : a.units) {
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
      cost += static_cast<std::int64_t>(row[arc]) * net.arcs()[arc].cost;
    }
  }
  return cost;
}

std::vector<std::string> audit_allocation(const FlowNetwork& net, const Allocation& a) {
  std::vector<std::string> out;
  if (static_cast<int>(a.units.size()) != net.num_commodities()) {
    out.push_back("allocation commodity count mismatch");
    return out;
  }
  const int n_nodes = net.mesh().num_nodes();
  for (int k = 0; k < net.num_commodities(); ++k) {
    const auto& c = net.commodities()[k];
    const auto& row = a.units[k];
    if (static_cast<int>(row.size()) != net.num_arcs()) {
      out.push_back(fmt::format("commodity {} arc count mismatch", k));
      continue;
    }
    std::vector<int> net_out(n_nodes, 0);
    for (int arc = 0; arc < net.num_arcs(); ++arc) {
      const int x = row[arc];
      if (x < 0) out.push_back(fmt::format("commodity {} negative flow on arc {}", k, arc));
      if (x == 0) continue;
      if (!net.admissible(k, arc)) {
        out.push_back(fmt::format("commodity {} uses inadmissible arc {}", k, arc));
      }
      net_out[net.arcs()[arc].from] += x;
      net_out[net.arcs()[arc].to] -= x;
    }
    for (int v = 0; v < n_nodes; ++v) {
      const int want = v == c.source ? c.demand : v == c.sink ? -c.demand : 0;
      if (net_out[v] != want) {
        out.push_back(fmt::format("commodity {} conservation broken at node {} ({} != {})", k, v,
                                  net_out[v], want));
      }
    }
    if (c.straight() && c.hops() > 0) {
      const auto path = net.straight_path(k);
      const int first = row[hardwired_arc(path.front())];
      for (int link : path) {
        if (row[hardwired_arc(link)] != first) {
          out.push_back(fmt::format("commodity {} hardwired lane width varies along its path", k));
          break;
        }
      }
    }
  }
  const auto loads = a.arc_loads();
  for (int arc = 0; arc < net.num_arcs(); ++arc) {
    if (loads[arc] > net.arcs()[arc].capacity) {
      out.push_back(fmt::format("arc {} over capacity ({} > {})", arc, loads[arc],
                                net.arcs()[arc].capacity));
    }
  }
  return out;
}

double minimal_path_count(int dx, int dy) {
  dx = std::abs(dx);
  dy = std::abs(dy);
  const int n = dx + dy, k = std::min(dx, dy);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double greedy_key(const Commodity& c) {
  return static_cast<double>(c.demand) / minimal_path_count(c.dx(), c.dy());
}

std::vector<std::vector<int>> enumerate_minimal_paths(const FlowNetwork& net, int commodity) {
  const auto& c = net.commodities()[commodity];
  const auto& mesh = net.mesh();
  const int sx = (c.dx() > 0) - (c.dx() < 0);
  const int sy = (c.dy() > 0) - (c.dy() < 0);
  std::vector<std::vector<int>> paths;
  std::vector<int> cur;
  auto rec = [&](auto&& self, Coord at) -> void {
    if (at == c.dst_xy) {
      paths.push_back(cur);
      return;
    }
    if (at.x != c.dst_xy.x) {
      Coord n{at.x + sx, at.y};
      cur.push_back(mesh.link_between(mesh.node(at), mesh.node(n)));
      self(self, n);
      cur.pop_back();
    }
    if (at.y != c.dst_xy.y) {
      Coord n{at.x, at.y + sy};
      cur.push_back(mesh.link_between(mesh.node(at), mesh.node(n)));
      self(self, n);
      cur.pop_back();
    }
  };
  rec(rec, c.src_xy);
  return paths;
}

std::vector<int> path_links(const Platform& mesh, std::span<const int> nodes) {
  std::vector<int> links;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const int l = mesh.link_between(nodes[i - 1], nodes[i]);
    if (l < 0) throw std::invalid_argument("path nodes are not adjacent");
    links.push_back(l);
  }
  return links;
}

}  // namespace sdmnoc
