#include <algorithm>
#include <limits>
#include <numeric>

#include "sdmnoc/flow_network.hpp"

namespace sdmnoc {

namespace {

/// Rectangle of a commodity laid out as a local row-major grid.
struct Grid {
  int dx = 0, dy = 0;
  std::vector<int> x_arc, y_arc;  // regular arcs, -1 where absent

  Grid(const FlowNetwork& net, const Commodity& c) {
    dx = std::abs(c.dx());
    dy = std::abs(c.dy());
    const int sx = c.dx() >= 0 ? 1 : -1, sy = c.dy() >= 0 ? 1 : -1;
    const auto& mesh = net.mesh();
    for (int j = 0; j <= dy; ++j) {
      for (int i = 0; i <= dx; ++i) {
        const Coord at{c.src_xy.x + i * sx, c.src_xy.y + j * sy};
        const int here = mesh.node(at);
        x_arc.push_back(i < dx ? regular_arc(mesh.link_between(here, mesh.node({at.x + sx, at.y}))) : -1);
        y_arc.push_back(j < dy ? regular_arc(mesh.link_between(here, mesh.node({at.x, at.y + sy}))) : -1);
      }
    }
  }

  std::size_t size() const { return x_arc.size(); }
  std::size_t width() const { return static_cast<std::size_t>(dx) + 1; }
};

/// Cheapest source-to-sink path over the grid's regular arcs; returns the
/// arcs in path order.
template <typename CostFn>
std::vector<int> cheapest_path(const Grid& g, CostFn&& cost, double* total) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.size(), kInf);
  std::vector<int> via(g.size(), -1);  // 0 = from x-arc, 1 = from y-arc
  dist[0] = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) {
    if (dist[v] == kInf) continue;
    if (g.x_arc[v] >= 0) {
      const double d = dist[v] + cost(g.x_arc[v]);
      if (d < dist[v + 1]) {
        dist[v + 1] = d;
        via[v + 1] = 0;
      }
    }
    if (g.y_arc[v] >= 0) {
      const double d = dist[v] + cost(g.y_arc[v]);
      if (d < dist[v + g.width()]) {
        dist[v + g.width()] = d;
        via[v + g.width()] = 1;
      }
    }
  }
  std::vector<int> arcs;
  std::size_t v = g.size() - 1;
  while (v != 0) {
    if (via[v] == 0) {
      arcs.push_back(g.x_arc[v - 1]);
      v -= 1;
    } else {
      arcs.push_back(g.y_arc[v - g.width()]);
      v -= g.width();
    }
  }
  std::reverse(arcs.begin(), arcs.end());
  *total = dist.back();
  return arcs;
}

}  // namespace

RouteResult solve_mcnf_heuristic(const FlowNetwork& net, const HeuristicOptions& opts) {
  const int k_count = net.num_commodities();
  std::vector<int> order(k_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int p, int q) {
    const auto& cp = net.commodities()[p];
    const auto& cq = net.commodities()[q];
    if (cp.demand != cq.demand) return cp.demand > cq.demand;
    return cp.flow_id < cq.flow_id;
  });

  std::vector<Grid> grids;
  grids.reserve(k_count);
  std::vector<std::vector<int>> straight_links(k_count);
  for (int k = 0; k < k_count; ++k) {
    const auto& c = net.commodities()[k];
    grids.emplace_back(net, c);
    if (c.straight() && c.hops() > 0) straight_links[k] = net.straight_path(k);
  }

  std::vector<double> history(net.num_arcs(), 0.0);
  std::vector<int> occupancy(net.num_arcs(), 0);
  double present = opts.present_factor;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::fill(occupancy.begin(), occupancy.end(), 0);
    Allocation alloc = Allocation::empty(net);

    auto arc_cost = [&](int a) {
      const auto& arc = net.arcs()[a];
      const int over = std::max(0, occupancy[a] + 1 - arc.capacity);
      return (arc.cost + history[a]) * (1.0 + present * over);
    };

    for (int k : order) {
      const auto& c = net.commodities()[k];
      if (c.hops() == 0) continue;
      for (int unit = 0; unit < c.demand; ++unit) {
        std::vector<int> chosen;
        if (!straight_links[k].empty()) {
          double reg = 0.0, hw = 0.0;
          bool hw_ok = net.mesh().hardwired_units() > 0;
          for (int link : straight_links[k]) {
            reg += arc_cost(regular_arc(link));
            if (hw_ok) hw += arc_cost(hardwired_arc(link));
          }
          const bool use_hw = hw_ok && hw <= reg;
          for (int link : straight_links[k]) {
            chosen.push_back(use_hw ? hardwired_arc(link) : regular_arc(link));
          }
        } else {
          double total = 0.0;
          chosen = cheapest_path(grids[k], arc_cost, &total);
        }
        for (int a : chosen) {
          ++occupancy[a];
          ++alloc.units[k][a];
        }
      }
    }

    bool overused = false;
    for (int a = 0; a < net.num_arcs(); ++a) {
      const int over = occupancy[a] - net.arcs()[a].capacity;
      if (over > 0) {
        overused = true;
        history[a] += opts.history_factor * over;
      }
    }
    if (!overused) {
      RouteResult r;
      r.status = RouteStatus::Feasible;
      r.cost = allocation_cost(net, alloc);
      r.allocation = std::move(alloc);
      return r;
    }
    present *= opts.present_growth;
  }

  RouteResult r;
  r.status = RouteStatus::Infeasible;
  r.allocation = Allocation::empty(net);
  return r;
}

}  // namespace sdmnoc
