#include <algorithm>
#include <cstring>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "sdmnoc/flow_network.hpp"

namespace sdmnoc {

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

/// Per-commodity view used by the enumerator.
struct Level {
  int commodity = 0;
  int demand = 0;
  bool straight = false;
  // straight commodities
  std::vector<int> reg_arcs;
  std::vector<int> hw_arcs;
  // rectangle commodities: local grid (dx+1) x (dy+1), row-major
  int dx = 0, dy = 0;
  std::vector<int> x_arc;  // arc to the next column, -1 on the last column
  std::vector<int> y_arc;  // arc to the next row, -1 on the last row
  std::int64_t min_cost = 0;
};

struct Entry {
  std::int64_t value = 0;
  bool exact = false;
  std::vector<std::pair<int, int>> option;  // (arc, units)
};

class ExactSolver {
 public:
  ExactSolver(const FlowNetwork& net, const ExactOptions& opts) : net_(net), opts_(opts) {
    residual_.resize(net.num_arcs());
    for (int a = 0; a < net.num_arcs(); ++a) residual_[a] = net.arcs()[a].capacity;
    build_levels();
  }

  RouteResult run() {
    RouteResult result;
    result.allocation = Allocation::empty(net_);
    const std::int64_t best = search(0, kInf);
    if (best >= kInf) {
      result.status = RouteStatus::Infeasible;
      return result;
    }
    for (std::size_t i = 0; i < levels_.size(); ++i) {
      const auto it = memo_.find(key(i));
      if (it == memo_.end() || !it->second.exact) {
        throw std::logic_error("exact solver lost its optimal trail");
      }
      const auto& lv = levels_[i];
      for (auto [arc, units] : it->second.option) {
        result.allocation.units[lv.commodity][arc] += units;
        residual_[arc] -= units;
      }
    }
    result.status = RouteStatus::Feasible;
    result.cost = allocation_cost(net_, result.allocation);
    return result;
  }

 private:
  void build_levels() {
    const int k_count = net_.num_commodities();
    // Commodities interact when they can share a link.
    std::vector<std::vector<bool>> uses(k_count, std::vector<bool>(net_.mesh().links().size(), false));
    for (int k = 0; k < k_count; ++k) {
      for (int a : net_.admissible_arcs(k)) uses[k][net_.arcs()[a].link] = true;
    }
    auto interacts = [&](int p, int q) {
      for (std::size_t l = 0; l < uses[p].size(); ++l) {
        if (uses[p][l] && uses[q][l]) return true;
      }
      return false;
    };
    auto heavier = [&](int p, int q) {
      const auto& cp = net_.commodities()[p];
      const auto& cq = net_.commodities()[q];
      if (cp.demand != cq.demand) return cp.demand > cq.demand;
      return p < q;
    };

    std::vector<bool> seen(k_count, false);
    std::vector<int> order;
    for (int start = 0; start < k_count; ++start) {
      if (seen[start]) continue;
      // gather the component, then BFS from its heaviest member
      std::vector<int> comp{start};
      seen[start] = true;
      for (std::size_t i = 0; i < comp.size(); ++i) {
        for (int q = 0; q < k_count; ++q) {
          if (!seen[q] && interacts(comp[i], q)) {
            seen[q] = true;
            comp.push_back(q);
          }
        }
      }
      std::sort(comp.begin(), comp.end(), heavier);
      std::vector<bool> queued(k_count, false);
      std::deque<int> bfs{comp.front()};
      queued[comp.front()] = true;
      while (!bfs.empty()) {
        const int p = bfs.front();
        bfs.pop_front();
        order.push_back(p);
        for (int q : comp) {
          if (!queued[q] && interacts(p, q)) {
            queued[q] = true;
            bfs.push_back(q);
          }
        }
      }
    }

    const auto& costs = net_.costs();
    const int h_cap = net_.mesh().hardwired_units();
    for (int k : order) {
      const auto& c = net_.commodities()[k];
      Level lv;
      lv.commodity = k;
      lv.demand = c.demand;
      lv.straight = c.straight();
      if (c.hops() == 0 || c.demand == 0) {
        lv.straight = true;
      } else if (lv.straight) {
        for (int link : net_.straight_path(k)) {
          lv.reg_arcs.push_back(regular_arc(link));
          lv.hw_arcs.push_back(hardwired_arc(link));
        }
        const int hw = std::min(c.demand, h_cap);
        lv.min_cost = static_cast<std::int64_t>(c.hops()) *
                      (static_cast<std::int64_t>(hw) * costs.hardwired +
                       static_cast<std::int64_t>(c.demand - hw) * costs.regular);
      } else {
        lv.dx = std::abs(c.dx());
        lv.dy = std::abs(c.dy());
        const int sx = c.dx() > 0 ? 1 : -1, sy = c.dy() > 0 ? 1 : -1;
        const auto& mesh = net_.mesh();
        for (int j = 0; j <= lv.dy; ++j) {
          for (int i = 0; i <= lv.dx; ++i) {
            const Coord at{c.src_xy.x + i * sx, c.src_xy.y + j * sy};
            const int here = mesh.node(at);
            lv.x_arc.push_back(i < lv.dx ? regular_arc(mesh.link_between(here, mesh.node({at.x + sx, at.y}))) : -1);
            lv.y_arc.push_back(j < lv.dy ? regular_arc(mesh.link_between(here, mesh.node({at.x, at.y + sy}))) : -1);
          }
        }
        lv.min_cost = static_cast<std::int64_t>(c.hops()) * c.demand * costs.regular;
      }
      levels_.push_back(std::move(lv));
    }

    lb_suffix_.assign(levels_.size() + 1, 0);
    for (std::size_t i = levels_.size(); i-- > 0;) lb_suffix_[i] = lb_suffix_[i + 1] + levels_[i].min_cost;

    projection_.resize(levels_.size());
    std::vector<bool> live(net_.num_arcs(), false);
    for (std::size_t i = levels_.size(); i-- > 0;) {
      for (int a : net_.admissible_arcs(levels_[i].commodity)) live[a] = true;
      for (int a = 0; a < net_.num_arcs(); ++a) {
        if (live[a]) projection_[i].push_back(a);
      }
    }
  }

  std::string key(std::size_t level) const {
    std::string k;
    k.resize(sizeof(std::uint32_t) + 2 * projection_[level].size());
    const auto lv = static_cast<std::uint32_t>(level);
    std::memcpy(k.data(), &lv, sizeof lv);
    std::size_t pos = sizeof lv;
    for (int a : projection_[level]) {
      const auto r = static_cast<std::uint16_t>(residual_[a]);
      std::memcpy(k.data() + pos, &r, sizeof r);
      pos += sizeof r;
    }
    return k;
  }

  std::int64_t search(std::size_t level, std::int64_t budget) {
    if (level == levels_.size()) return 0;
    if (lb_suffix_[level] >= budget) return kInf;
    const std::string k = key(level);
    if (auto it = memo_.find(k); it != memo_.end()) {
      if (it->second.exact) return it->second.value < budget ? it->second.value : kInf;
      if (it->second.value >= budget) return kInf;
    }

    std::int64_t best = kInf;
    std::vector<std::pair<int, int>> best_option;
    const std::size_t base = assigned_.size();
    auto at_leaf = [&](std::int64_t cost) {
      if (++nodes_ > opts_.node_budget) {
        throw BudgetExceeded(fmt::format("exact MCNF search exceeded {} nodes", opts_.node_budget));
      }
      const std::int64_t limit = std::min(budget, best) - cost;
      if (lb_suffix_[level + 1] >= limit) return;
      const std::int64_t sub = search(level + 1, limit);
      if (sub < kInf) {
        best = cost + sub;
        best_option.assign(assigned_.begin() + static_cast<std::ptrdiff_t>(base), assigned_.end());
      }
    };
    enumerate(levels_[level], at_leaf);

    if (memo_.size() >= opts_.memo_limit) {
      throw BudgetExceeded(fmt::format("exact MCNF memo exceeded {} states", opts_.memo_limit));
    }
    auto& e = memo_[k];
    if (best < kInf) {
      e.value = best;
      e.exact = true;
      e.option = std::move(best_option);
    } else if (!e.exact) {
      e.value = std::max(e.value, budget);
    }
    return best;
  }

  template <typename Leaf>
  void enumerate(const Level& lv, Leaf& leaf) {
    const auto& costs = net_.costs();
    if (lv.reg_arcs.empty() && lv.x_arc.empty()) {
      leaf(0);
      return;
    }
    if (lv.straight) {
      int hw_room = lv.demand, reg_room = lv.demand;
      for (int a : lv.hw_arcs) hw_room = std::min(hw_room, residual_[a]);
      for (int a : lv.reg_arcs) reg_room = std::min(reg_room, residual_[a]);
      const auto hops = static_cast<std::int64_t>(lv.reg_arcs.size());
      for (int h = hw_room; h >= 0; --h) {
        const int r = lv.demand - h;
        if (r > reg_room) break;
        for (std::size_t i = 0; i < lv.reg_arcs.size(); ++i) {
          apply(lv.hw_arcs[i], h);
          apply(lv.reg_arcs[i], r);
        }
        leaf(hops * (static_cast<std::int64_t>(h) * costs.hardwired +
                     static_cast<std::int64_t>(r) * costs.regular));
        for (std::size_t i = lv.reg_arcs.size(); i-- > 0;) {
          undo(lv.reg_arcs[i], r);
          undo(lv.hw_arcs[i], h);
        }
      }
      return;
    }
    std::vector<int> inflow(lv.x_arc.size(), 0);
    inflow[0] = lv.demand;
    const std::int64_t cost = static_cast<std::int64_t>(lv.dx + lv.dy) * lv.demand * costs.regular;
    split(lv, inflow, 0, cost, leaf);
  }

  template <typename Leaf>
  void split(const Level& lv, std::vector<int>& inflow, std::size_t node, std::int64_t cost,
             Leaf& leaf) {
    const std::size_t last = lv.x_arc.size() - 1;
    while (node < last && inflow[node] == 0) ++node;
    if (node == last) {
      leaf(cost);
      return;
    }
    const int f = inflow[node];
    const int xa = lv.x_arc[node], ya = lv.y_arc[node];
    const int cx = xa >= 0 ? residual_[xa] : 0;
    const int cy = ya >= 0 ? residual_[ya] : 0;
    const std::size_t width = static_cast<std::size_t>(lv.dx) + 1;
    for (int a = std::min(f, cx); a >= std::max(0, f - cy); --a) {
      const int b = f - a;
      if (a > 0) {
        apply(xa, a);
        inflow[node + 1] += a;
      }
      if (b > 0) {
        apply(ya, b);
        inflow[node + width] += b;
      }
      split(lv, inflow, node + 1, cost, leaf);
      if (b > 0) {
        inflow[node + width] -= b;
        undo(ya, b);
      }
      if (a > 0) {
        inflow[node + 1] -= a;
        undo(xa, a);
      }
    }
  }

  void apply(int arc, int units) {
    if (units == 0) return;
    residual_[arc] -= units;
    assigned_.emplace_back(arc, units);
  }
  void undo(int arc, int units) {
    if (units == 0) return;
    residual_[arc] += units;
    assigned_.pop_back();
  }

  const FlowNetwork& net_;
  ExactOptions opts_;
  std::vector<int> residual_;
  std::vector<Level> levels_;
  std::vector<std::int64_t> lb_suffix_;
  std::vector<std::vector<int>> projection_;
  std::unordered_map<std::string, Entry> memo_;
  std::vector<std::pair<int, int>> assigned_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

RouteResult solve_mcnf_exact(const FlowNetwork& net, const ExactOptions& opts) {
  ExactSolver solver(net, opts);
  return solver.run();
}

}  // namespace sdmnoc
