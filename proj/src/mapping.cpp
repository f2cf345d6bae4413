#include "sdmnoc/mapping.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

#include "sdmnoc/rng.hpp"

namespace sdmnoc {

namespace {

void require_fits(const TaskGraph& g, const Platform& mesh) {
  if (g.num_tasks > mesh.num_nodes()) {
    throw MappingError(fmt::format("{} tasks do not fit on a {}x{} mesh", g.num_tasks,
                                   mesh.config().rows, mesh.config().cols));
  }
}

/// Symmetric traffic weights as adjacency lists.
struct Neighbors {
  std::vector<std::vector<std::pair<int, std::int64_t>>> adj;

  explicit Neighbors(const TaskGraph& g) : adj(static_cast<std::size_t>(g.num_tasks)) {
    std::vector<std::vector<std::int64_t>> w(
        static_cast<std::size_t>(g.num_tasks),
        std::vector<std::int64_t>(static_cast<std::size_t>(g.num_tasks), 0));
    for (const auto& f : g.flows) {
      w[static_cast<std::size_t>(f.src)][static_cast<std::size_t>(f.dst)] += f.demand_bps;
      w[static_cast<std::size_t>(f.dst)][static_cast<std::size_t>(f.src)] += f.demand_bps;
    }
    for (int i = 0; i < g.num_tasks; ++i) {
      for (int j = 0; j < g.num_tasks; ++j) {
        const auto v = w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (v > 0) adj[static_cast<std::size_t>(i)].emplace_back(j, v);
      }
    }
  }
};

std::vector<int> seeded_priority(int n, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  std::vector<int> rank(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rank[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;
  return rank;
}

}  // namespace

bool is_valid_mapping(const TaskGraph& g, const Platform& mesh, const Mapping& p) {
  if (static_cast<int>(p.node_of_task.size()) != g.num_tasks) return false;
  std::vector<bool> used(static_cast<std::size_t>(mesh.num_nodes()), false);
  for (int node : p.node_of_task) {
    if (node < 0 || node >= mesh.num_nodes()) return false;
    if (used[static_cast<std::size_t>(node)]) return false;
    used[static_cast<std::size_t>(node)] = true;
  }
  return true;
}

std::int64_t mapping_cost(const TaskGraph& g, const Platform& mesh, const Mapping& p) {
  std::int64_t cost = 0;
  for (const auto& f : g.flows) {
    const auto a = mesh.coord(p.node_of_task[static_cast<std::size_t>(f.src)]);
    const auto b = mesh.coord(p.node_of_task[static_cast<std::size_t>(f.dst)]);
    cost += f.demand_bps * manhattan_dist(a, b);
  }
  return cost;
}

Mapping map_tasks_heuristic(const TaskGraph& g, const Platform& mesh, std::uint64_t seed,
                            MappingTrace* trace) {
  require_fits(g, mesh);
  const int n_tasks = g.num_tasks;
  const int n_nodes = mesh.num_nodes();
  const Neighbors nb(g);
  Rng rng(seed);
  const auto task_rank = seeded_priority(n_tasks, rng);
  const auto node_rank = seeded_priority(n_nodes, rng);

  std::vector<int> at(static_cast<std::size_t>(n_nodes), -1);  // node -> task
  Mapping p;
  p.node_of_task.assign(static_cast<std::size_t>(n_tasks), -1);
  auto dist = [&](int a, int b) { return manhattan_dist(mesh.coord(a), mesh.coord(b)); };

  // Centre node: smallest total distance to every node.
  int centre = 0;
  std::int64_t centre_score = std::numeric_limits<std::int64_t>::max();
  for (int v = 0; v < n_nodes; ++v) {
    std::int64_t s = 0;
    for (int u = 0; u < n_nodes; ++u) s += dist(u, v);
    if (s < centre_score || (s == centre_score && node_rank[v] < node_rank[centre])) {
      centre = v;
      centre_score = s;
    }
  }

  int first = 0;
  for (int t = 1; t < n_tasks; ++t) {
    const auto wt = g.total_demand(t), wf = g.total_demand(first);
    if (wt > wf || (wt == wf && task_rank[t] < task_rank[first])) first = t;
  }
  p.node_of_task[first] = centre;
  at[centre] = first;

  std::vector<std::int64_t> to_placed(static_cast<std::size_t>(n_tasks), 0);
  for (auto [j, w] : nb.adj[first]) to_placed[j] += w;

  for (int placed = 1; placed < n_tasks; ++placed) {
    int pick = -1;
    for (int t = 0; t < n_tasks; ++t) {
      if (p.node_of_task[t] >= 0) continue;
      if (pick < 0 || to_placed[t] > to_placed[pick] ||
          (to_placed[t] == to_placed[pick] && task_rank[t] < task_rank[pick])) {
        pick = t;
      }
    }
    int best_node = -1;
    std::int64_t best_cost = 0;
    for (int v = 0; v < n_nodes; ++v) {
      if (at[v] >= 0) continue;
      std::int64_t c = 0;
      for (auto [j, w] : nb.adj[pick]) {
        if (p.node_of_task[j] >= 0) c += w * dist(v, p.node_of_task[j]);
      }
      if (best_node < 0 || c < best_cost || (c == best_cost && node_rank[v] < node_rank[best_node])) {
        best_node = v;
        best_cost = c;
      }
    }
    p.node_of_task[pick] = best_node;
    at[best_node] = pick;
    for (auto [j, w] : nb.adj[pick]) to_placed[j] += w;
  }

  std::int64_t cost = mapping_cost(g, mesh, p);
  if (trace) trace->costs = {cost};

  // Moving task t from node `from` to node `to`, with the occupant of `to`
  // (if any) going the other way.
  auto move_delta = [&](int t, int from, int to, int other) {
    std::int64_t d = 0;
    for (auto [j, w] : nb.adj[t]) {
      if (j == other) continue;
      const int pj = p.node_of_task[j];
      d += w * (dist(to, pj) - dist(from, pj));
    }
    return d;
  };

  while (true) {
    std::int64_t best_delta = 0;
    int best_a = -1, best_b = -1;
    for (int a = 0; a < n_nodes; ++a) {
      for (int b = a + 1; b < n_nodes; ++b) {
        const int ta = at[a], tb = at[b];
        if (ta < 0 && tb < 0) continue;
        std::int64_t d = 0;
        if (ta >= 0) d += move_delta(ta, a, b, tb);
        if (tb >= 0) d += move_delta(tb, b, a, ta);
        if (d < best_delta) {
          best_delta = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    if (best_a < 0) break;
    const int ta = at[best_a], tb = at[best_b];
    at[best_a] = tb;
    at[best_b] = ta;
    if (ta >= 0) p.node_of_task[ta] = best_b;
    if (tb >= 0) p.node_of_task[tb] = best_a;
    cost += best_delta;
    if (trace) trace->costs.push_back(cost);
  }
  return p;
}

Mapping map_tasks_random(const TaskGraph& g, const Platform& mesh, std::uint64_t seed) {
  require_fits(g, mesh);
  Rng rng(seed);
  std::vector<int> nodes(static_cast<std::size_t>(mesh.num_nodes()));
  std::iota(nodes.begin(), nodes.end(), 0);
  rng.shuffle(std::span<int>(nodes));
  nodes.resize(static_cast<std::size_t>(g.num_tasks));
  return Mapping{std::move(nodes)};
}

Mapping map_tasks_exhaustive(const TaskGraph& g, const Platform& mesh,
                             std::uint64_t max_placements) {
  require_fits(g, mesh);
  const int n_tasks = g.num_tasks;
  const int n_nodes = mesh.num_nodes();
  double count = 1.0;
  for (int i = 0; i < n_tasks; ++i) count *= static_cast<double>(n_nodes - i);
  if (count > static_cast<double>(max_placements)) {
    throw MappingError(fmt::format("exhaustive mapping needs {:.3g} placements (guard {})", count,
                                   max_placements));
  }

  // Flows grouped by the later-indexed endpoint so each is charged once both
  // ends are placed.
  std::vector<std::vector<std::pair<int, std::int64_t>>> back(static_cast<std::size_t>(n_tasks));
  for (const auto& f : g.flows) {
    const int hi = std::max(f.src, f.dst), lo = std::min(f.src, f.dst);
    back[hi].emplace_back(lo, f.demand_bps);
  }

  std::vector<int> cur(static_cast<std::size_t>(n_tasks), -1);
  std::vector<bool> used(static_cast<std::size_t>(n_nodes), false);
  std::vector<int> best;
  std::int64_t best_cost = std::numeric_limits<std::int64_t>::max();

  auto rec = [&](auto&& self, int t, std::int64_t partial) -> void {
    if (partial >= best_cost) return;
    if (t == n_tasks) {
      best_cost = partial;
      best = cur;
      return;
    }
    for (int v = 0; v < n_nodes; ++v) {
      if (used[v]) continue;
      std::int64_t add = 0;
      for (auto [j, w] : back[t]) add += w * manhattan_dist(mesh.coord(v), mesh.coord(cur[j]));
      used[v] = true;
      cur[t] = v;
      self(self, t + 1, partial + add);
      used[v] = false;
    }
    cur[t] = -1;
  };
  rec(rec, 0, 0);
  return Mapping{std::move(best)};
}

std::string render_mapping(const TaskGraph& g, const Platform& mesh, const Mapping& p) {
  nlohmann::json placement = nlohmann::json::array();
  for (int t = 0; t < g.num_tasks; ++t) {
    const auto c = mesh.coord(p.node_of_task[t]);
    placement.push_back({{"task", t}, {"node", {c.x, c.y}}});
  }
  nlohmann::json doc{{"placement", std::move(placement)}, {"cost", mapping_cost(g, mesh, p)}};
  return doc.dump(2) + "\n";
}

}  // namespace sdmnoc
