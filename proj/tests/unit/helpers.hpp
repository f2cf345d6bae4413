#pragma once

#include <cstdint>
#include <initializer_list>
#include <tuple>
#include <vector>

#include "sdmnoc/ctg.hpp"
#include "sdmnoc/mapping.hpp"
#include "sdmnoc/platform.hpp"

namespace testutil {

inline sdmnoc::MeshConfig mesh_cfg(int rows, int cols, int n, int m, int l, std::uint64_t f) {
  sdmnoc::MeshConfig c;
  c.rows = rows;
  c.cols = cols;
  c.link_width = n;
  c.unit_width = m;
  c.hardwired_per_port = l;
  c.frequency_hz = f;
  return c;
}

/// One task per listed endpoint; flows given as (src task, dst task, bps).
inline sdmnoc::TaskGraph graph(int tasks, std::initializer_list<std::tuple<int, int, std::int64_t>> flows) {
  sdmnoc::TaskGraph g;
  g.num_tasks = tasks;
  for (const auto& [s, d, bps] : flows) {
    g.flows.push_back({static_cast<int>(g.flows.size()), s, d, bps});
  }
  return g;
}

/// Task i sits at coords[i].
inline sdmnoc::Mapping place(const sdmnoc::Platform& mesh, std::initializer_list<sdmnoc::Coord> coords) {
  sdmnoc::Mapping p;
  for (auto c : coords) p.node_of_task.push_back(mesh.node(c));
  return p;
}

}  // namespace testutil
