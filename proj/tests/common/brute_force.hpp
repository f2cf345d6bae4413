#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <vector>

#include "sdmnoc/platform.hpp"
#include "sdmnoc/rng.hpp"

namespace oracle {

/// Unit demand between two mesh nodes.
struct Demand {
  int src = 0;
  int dst = 0;
  int units = 0;
};

struct Route {
  std::vector<int> links;
  bool hardwired = false;
};

/// Minimal paths by walking the lattice, independent of the library's
/// enumerator. Straight demands also get a hardwired lane route when H > 0.
inline std::vector<Route> routes_of(const sdmnoc::Platform& mesh, const Demand& d) {
  const auto a = mesh.coord(d.src), b = mesh.coord(d.dst);
  const int sx = b.x > a.x ? 1 : -1, sy = b.y > a.y ? 1 : -1;
  std::vector<Route> out;
  std::vector<int> links;
  auto walk = [&](auto&& self, sdmnoc::Coord at) -> void {
    if (at == b) {
      out.push_back({links, false});
      return;
    }
    if (at.x != b.x) {
      const sdmnoc::Coord n{at.x + sx, at.y};
      links.push_back(mesh.link_between(mesh.node(at), mesh.node(n)));
      self(self, n);
      links.pop_back();
    }
    if (at.y != b.y) {
      const sdmnoc::Coord n{at.x, at.y + sy};
      links.push_back(mesh.link_between(mesh.node(at), mesh.node(n)));
      self(self, n);
      links.pop_back();
    }
  };
  walk(walk, a);
  if ((a.x == b.x || a.y == b.y) && mesh.hardwired_units() > 0) out.push_back({out.front().links, true});
  return out;
}

/// Minimum total cost over every split of every demand across its routes;
/// empty when nothing fits. Regular units cost `regular` per hop, hardwired
/// units `hardwired` per hop.
inline std::optional<std::int64_t> brute_force_min_cost(const sdmnoc::Platform& mesh,
                                                        const std::vector<Demand>& demands,
                                                        int regular = 2, int hardwired = 1) {
  const int n_links = static_cast<int>(mesh.links().size());
  std::vector<int> reg_free(n_links, mesh.config().configurable_units());
  std::vector<int> hw_free(n_links, mesh.hardwired_units());
  std::vector<std::vector<Route>> routes;
  for (const auto& d : demands) routes.push_back(routes_of(mesh, d));

  std::optional<std::int64_t> best;
  auto place = [&](auto&& self, std::size_t k, std::size_t r, int left, std::int64_t cost) -> void {
    if (k == demands.size()) {
      if (!best || cost < *best) best = cost;
      return;
    }
    const auto& rs = routes[k];
    if (left == 0) {
      self(self, k + 1, 0, k + 1 < demands.size() ? demands[k + 1].units : 0, cost);
      return;
    }
    if (r == rs.size()) return;
    const auto& route = rs[r];
    auto& free = route.hardwired ? hw_free : reg_free;
    int room = left;
    for (int l : route.links) room = std::min(room, free[l]);
    for (int x = room; x >= 0; --x) {
      for (int l : route.links) free[l] -= x;
      const std::int64_t add =
          static_cast<std::int64_t>(x) * static_cast<std::int64_t>(route.links.size()) * (route.hardwired ? hardwired : regular);
      self(self, k, r + 1, left - x, cost + add);
      for (int l : route.links) free[l] += x;
    }
  };
  if (demands.empty()) return 0;
  place(place, 0, 0, demands[0].units, 0);
  return best;
}

/// Small random instance: distinct endpoints, 1..max_units units each.
struct MicroInstance {
  sdmnoc::MeshConfig cfg;
  std::vector<Demand> demands;
};

inline MicroInstance micro_instance(std::uint64_t seed, int max_rows, int max_cols, int max_commodities,
                                    int max_units) {
  sdmnoc::Rng rng(seed);
  MicroInstance mi;
  mi.cfg.rows = static_cast<int>(rng.between(1, max_rows));
  mi.cfg.cols = static_cast<int>(rng.between(mi.cfg.rows == 1 ? 2 : 1, max_cols));
  const int u = static_cast<int>(rng.between(2, max_units));
  mi.cfg.unit_width = 1;
  mi.cfg.link_width = u;
  mi.cfg.hardwired_per_port = static_cast<int>(rng.between(0, u - 1));
  mi.cfg.frequency_hz = 1'000;
  const int nodes = mi.cfg.rows * mi.cfg.cols;
  const int k = static_cast<int>(rng.between(1, std::min(max_commodities, nodes * (nodes - 1))));
  std::map<std::pair<int, int>, bool> used;
  for (int i = 0; i < k; ++i) {
    int s = 0, d = 0;
    do {
      s = static_cast<int>(rng.below(nodes));
      d = static_cast<int>(rng.below(nodes));
    } while (s == d || used.count({s, d}));
    used[{s, d}] = true;
    mi.demands.push_back({s, d, static_cast<int>(rng.between(1, u))});
  }
  return mi;
}

}  // namespace oracle
