#include <algorithm>
#include <limits>
#include <queue>

#include "sdmnoc/flow_network.hpp"

namespace sdmnoc {

namespace {

int chunks(int packet_bits, int width_bits) {
  return (packet_bits + width_bits - 1) / width_bits;
}

/// Latency gain per extra unit until the chunk count next drops.
double gain(double weight, int units, int unit_width, int packet_bits) {
  if (units <= 0) return 0.0;
  const int s = chunks(packet_bits, units * unit_width);
  if (s <= 1) return 0.0;
  const int target = (packet_bits + unit_width * (s - 1) - 1) / (unit_width * (s - 1));
  return weight * (s - chunks(packet_bits, target * unit_width)) / (target - units);
}

/// Path through the commodity's rectangle with a free regular unit on every
/// arc, touching as few arcs new to the commodity as possible.
std::vector<int> spare_path(const FlowNetwork& net, int k, const std::vector<int>& residual,
                            const std::vector<int>& row) {
  const auto& c = net.commodities()[k];
  const auto& mesh = net.mesh();
  const int dx = std::abs(c.dx()), dy = std::abs(c.dy());
  const int sx = c.dx() >= 0 ? 1 : -1, sy = c.dy() >= 0 ? 1 : -1;
  const int w = dx + 1;
  constexpr int kFar = std::numeric_limits<int>::max();
  std::vector<int> dist((dx + 1) * (dy + 1), kFar), via(dist.size(), -1), arc_in(dist.size(), -1);
  dist[0] = 0;
  for (int j = 0; j <= dy; ++j) {
    for (int i = 0; i <= dx; ++i) {
      const int v = j * w + i;
      if (dist[v] == kFar) continue;
      const Coord at{c.src_xy.x + i * sx, c.src_xy.y + j * sy};
      auto relax = [&](Coord next, int u) {
        const int a = regular_arc(mesh.link_between(mesh.node(at), mesh.node(next)));
        if (residual[a] <= 0) return;
        const int d = dist[v] + (row[a] > 0 ? 0 : 1);
        if (d < dist[u]) {
          dist[u] = d;
          via[u] = v;
          arc_in[u] = a;
        }
      };
      if (i < dx) relax({at.x + sx, at.y}, v + 1);
      if (j < dy) relax({at.x, at.y + sy}, v + w);
    }
  }
  std::vector<int> arcs;
  if (dist.back() == kFar) return arcs;
  for (int v = static_cast<int>(dist.size()) - 1; v != 0; v = via[v]) arcs.push_back(arc_in[v]);
  return arcs;
}

}  // namespace

void widen_allocation(FlowNetwork& net, Allocation& a, std::span<const double> weights,
                      int packet_bits) {
  const int m = net.mesh().config().unit_width;
  std::vector<int> residual(net.num_arcs());
  const auto loads = a.arc_loads();
  for (int arc = 0; arc < net.num_arcs(); ++arc) residual[arc] = net.arcs()[arc].capacity - loads[arc];

  using Item = std::pair<double, int>;  // (gain, -commodity)
  std::priority_queue<Item> queue;
  auto push = [&](int k) {
    const auto& c = net.commodities()[k];
    // per link-unit spent, so long circuits do not starve short ones
    const double g = gain(weights[k], c.demand, m, packet_bits) / c.hops();
    if (g > 0.0) queue.emplace(g, -k);
  };
  for (int k = 0; k < net.num_commodities(); ++k) {
    if (net.commodities()[k].hops() > 0) push(k);
  }

  while (!queue.empty()) {
    const int k = -queue.top().second;
    queue.pop();
    const auto& c = net.commodities()[k];
    auto& row = a.units[k];
    std::vector<int> arcs;
    if (c.straight()) {
      const auto links = net.straight_path(k);
      auto lane_free = [&](auto arc_of) {
        return std::all_of(links.begin(), links.end(), [&](int l) { return residual[arc_of(l)] > 0; });
      };
      if (net.mesh().hardwired_units() > 0 && lane_free(hardwired_arc)) {
        for (int l : links) arcs.push_back(hardwired_arc(l));
      } else if (lane_free(regular_arc)) {
        for (int l : links) arcs.push_back(regular_arc(l));
      }
    } else {
      arcs = spare_path(net, k, residual, row);
    }
    if (arcs.empty()) continue;
    for (int arc : arcs) {
      ++row[arc];
      --residual[arc];
    }
    net.set_demand(k, c.demand + 1);
    push(k);
  }
}

}  // namespace sdmnoc
