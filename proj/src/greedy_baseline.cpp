#include <algorithm>
#include <limits>
#include <numeric>

#include "sdmnoc/flow_network.hpp"

namespace sdmnoc {

RouteResult route_greedy_baseline(const FlowNetwork& net) {
  const int k_count = net.num_commodities();
  std::vector<int> order(k_count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> keys(k_count);
  for (int k = 0; k < k_count; ++k) keys[k] = greedy_key(net.commodities()[k]);
  std::stable_sort(order.begin(), order.end(), [&](int p, int q) {
    if (keys[p] != keys[q]) return keys[p] > keys[q];
    return net.commodities()[p].flow_id < net.commodities()[q].flow_id;
  });

  std::vector<int> residual(net.num_arcs());
  for (int a = 0; a < net.num_arcs(); ++a) residual[a] = net.arcs()[a].capacity;
  RouteResult result;
  result.allocation = Allocation::empty(net);
  const bool have_hw = net.mesh().hardwired_units() > 0;

  for (int k : order) {
    const auto& c = net.commodities()[k];
    if (c.hops() == 0 || c.demand == 0) continue;
    auto& row = result.allocation.units[k];
    if (c.straight()) {
      const auto links = net.straight_path(k);
      int hw = have_hw ? c.demand : 0, reg_room = std::numeric_limits<int>::max();
      for (int l : links) {
        if (have_hw) hw = std::min(hw, residual[hardwired_arc(l)]);
        reg_room = std::min(reg_room, residual[regular_arc(l)]);
      }
      const int reg = c.demand - hw;
      if (reg > reg_room) {
        result.status = RouteStatus::Infeasible;
        return result;
      }
      for (int l : links) {
        row[hardwired_arc(l)] += hw;
        residual[hardwired_arc(l)] -= hw;
        row[regular_arc(l)] += reg;
        residual[regular_arc(l)] -= reg;
      }
      continue;
    }
    int best = -1, best_room = -1;
    const auto paths = enumerate_minimal_paths(net, k);
    for (std::size_t p = 0; p < paths.size(); ++p) {
      int room = std::numeric_limits<int>::max();
      for (int l : paths[p]) room = std::min(room, residual[regular_arc(l)]);
      if (room >= c.demand && room > best_room) {
        best = static_cast<int>(p);
        best_room = room;
      }
    }
    if (best < 0) {
      result.status = RouteStatus::Infeasible;
      return result;
    }
    for (int l : paths[best]) {
      row[regular_arc(l)] += c.demand;
      residual[regular_arc(l)] -= c.demand;
    }
  }
  result.status = RouteStatus::Feasible;
  result.cost = allocation_cost(net, result.allocation);
  return result;
}

}  // namespace sdmnoc
