#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "../common/brute_force.hpp"
#include "helpers.hpp"
#include "sdmnoc/circuits.hpp"
#include "sdmnoc/flow_network.hpp"

using namespace sdmnoc;
using testutil::mesh_cfg;

namespace {

struct Instance {
  Platform mesh;
  TaskGraph g;
  Mapping p;
  std::vector<UnitDemand> demands;
};

/// One task per mesh node, identity placement.
Instance make(const MeshConfig& cfg, const std::vector<oracle::Demand>& ds) {
  Instance in{Platform(cfg), {}, {}, {}};
  in.g.num_tasks = cfg.num_nodes();
  for (const auto& d : ds) {
    in.g.flows.push_back({static_cast<int>(in.g.flows.size()), d.src, d.dst,
                          static_cast<std::int64_t>(d.units) * static_cast<std::int64_t>(unit_bandwidth(cfg))});
  }
  in.p.node_of_task.resize(cfg.num_nodes());
  std::iota(in.p.node_of_task.begin(), in.p.node_of_task.end(), 0);
  in.demands = compute_unit_demands(in.g, cfg);
  return in;
}

/// The 3 + 2 split: a 5-unit flow across a 2x2 mesh after two blockers leave
/// 3 free units on one first hop and 2 on the other.
std::vector<oracle::Demand> split_demands() { return {{0, 3, 5}, {0, 1, 5}, {0, 2, 6}}; }

}  // namespace

TEST(UnitDemand, WireExamples) {
  // one wire carries 1 Mb/s at 1 MHz
  Flow f{0, 0, 1, 6'000'000};
  EXPECT_EQ(compute_unit_demand(f, mesh_cfg(1, 2, 128, 1, 0, 1'000'000)).units, 6);
  EXPECT_EQ(compute_unit_demand(f, mesh_cfg(1, 2, 128, 4, 0, 1'000'000)).units, 2);
}

TEST(UnitDemand, CeilingInequality) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const int m = 1 << rng.below(6);
    const auto f_hz = static_cast<std::uint64_t>(rng.between(1, 2'000'000'000));
    const std::int64_t d = rng.between(1, 50'000'000'000);
    const auto cfg = mesh_cfg(1, 2, 128, m, 0, f_hz);
    const auto u = static_cast<unsigned __int128>(compute_unit_demand({0, 0, 1, d}, cfg).units);
    const auto bw = static_cast<unsigned __int128>(m) * f_hz;
    ASSERT_GE(u * bw, static_cast<unsigned __int128>(d));
    ASSERT_LT((u - 1) * bw, static_cast<unsigned __int128>(d));
  }
}

TEST(FlowNetwork, ArcLayoutAndCapacities) {
  auto in = make(mesh_cfg(2, 2, 8, 1, 3, 1000), {{0, 3, 1}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  ASSERT_EQ(net.num_arcs(), 2 * static_cast<int>(in.mesh.links().size()));
  for (int l = 0; l < static_cast<int>(in.mesh.links().size()); ++l) {
    const auto& r = net.arcs()[regular_arc(l)];
    const auto& h = net.arcs()[hardwired_arc(l)];
    EXPECT_EQ(r.kind, ArcKind::Regular);
    EXPECT_EQ(h.kind, ArcKind::Hardwired);
    EXPECT_EQ(r.capacity, 5);
    EXPECT_EQ(h.capacity, 3);
    EXPECT_EQ(r.cost, 2);
    EXPECT_EQ(h.cost, 1);
  }
}

TEST(FlowNetwork, RectangleAndDirection) {
  const auto cfg = mesh_cfg(3, 3, 8, 1, 2, 1000);
  // (0,0) -> (2,1) bends; (0,2) -> (2,2) is straight
  auto in = make(cfg, {{0, 5, 1}, {6, 8, 1}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  for (int a = 0; a < net.num_arcs(); ++a) {
    const auto& arc = net.arcs()[a];
    const auto from = in.mesh.coord(arc.from), to = in.mesh.coord(arc.to);
    const bool in_box0 = from.y <= 1 && to.y <= 1;
    const bool forward0 = to.x > from.x || to.y > from.y;
    EXPECT_EQ(net.admissible(0, a), in_box0 && forward0 && arc.kind == ArcKind::Regular) << a;
    const bool on_row2 = from.y == 2 && to.y == 2 && to.x > from.x;
    EXPECT_EQ(net.admissible(1, a), on_row2) << a;
  }
  EXPECT_EQ(net.straight_path(1).size(), 2u);
}

TEST(FlowNetwork, MinimalPaths) {
  const auto cfg = mesh_cfg(4, 4, 8, 1, 0, 1000);
  auto in = make(cfg, {{0, 15, 1}, {12, 2, 1}, {5, 6, 1}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const std::size_t expected[] = {20, 10, 1};  // C(6,3), C(5,2), 1
  for (int k = 0; k < 3; ++k) {
    const auto paths = enumerate_minimal_paths(net, k);
    EXPECT_EQ(paths.size(), expected[k]);
    const auto& c = net.commodities()[k];
    EXPECT_DOUBLE_EQ(minimal_path_count(c.dx(), c.dy()), static_cast<double>(expected[k]));
    std::set<std::vector<int>> unique(paths.begin(), paths.end());
    EXPECT_EQ(unique.size(), paths.size());
    for (const auto& p : paths) EXPECT_EQ(static_cast<int>(p.size()), c.hops());
  }
}

TEST(FlowNetwork, AuditCatchesViolations) {
  auto in = make(mesh_cfg(1, 3, 4, 1, 2, 1000), {{0, 2, 2}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  auto a = Allocation::empty(net);
  const auto path = net.straight_path(0);
  for (int l : path) a.units[0][regular_arc(l)] = 2;
  EXPECT_TRUE(audit_allocation(net, a).empty());
  EXPECT_EQ(allocation_cost(net, a), 2 * 2 * 2);

  auto lane = a;
  lane.units[0][regular_arc(path[1])] = 1;
  lane.units[0][hardwired_arc(path[1])] = 1;
  EXPECT_FALSE(audit_allocation(net, lane).empty());  // lane width changes mid-path

  auto over = a;
  for (int l : path) over.units[0][regular_arc(l)] = 3;
  EXPECT_FALSE(audit_allocation(net, over).empty());
}

TEST(Exact, MatchesBruteForce) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto mi = oracle::micro_instance(seed, 3, 3, 3, 4);
    auto in = make(mi.cfg, mi.demands);
    const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
    const auto r = solve_mcnf_exact(net);
    const auto bf = oracle::brute_force_min_cost(in.mesh, mi.demands);
    ASSERT_EQ(r.feasible(), bf.has_value()) << seed;
    if (!bf) continue;
    EXPECT_EQ(r.cost, *bf) << seed;
    EXPECT_EQ(allocation_cost(net, r.allocation), r.cost);
    EXPECT_TRUE(audit_allocation(net, r.allocation).empty()) << seed;
  }
}

TEST(Exact, PrefersHardwiredLane) {
  auto in = make(mesh_cfg(1, 4, 8, 1, 4, 1000), {{0, 3, 6}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const auto r = solve_mcnf_exact(net);
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.cost, 3 * (4 * 1 + 2 * 2));
}

TEST(Heuristic, SoundOnRandomInstances) {
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    const auto mi = oracle::micro_instance(seed, 4, 4, 8, 8);
    auto in = make(mi.cfg, mi.demands);
    const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
    const auto r = solve_mcnf_heuristic(net);
    if (!r.feasible()) continue;
    EXPECT_TRUE(audit_allocation(net, r.allocation).empty()) << seed;
    EXPECT_EQ(allocation_cost(net, r.allocation), r.cost);
    const auto bf = oracle::brute_force_min_cost(in.mesh, mi.demands);
    ASSERT_TRUE(bf.has_value()) << seed;
    EXPECT_GE(r.cost, *bf);
  }
}

TEST(Split, ThreePlusTwo) {
  auto in = make(mesh_cfg(2, 2, 8, 1, 0, 1000), split_demands());
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  EXPECT_FALSE(route_greedy_baseline(net).feasible());
  for (const auto& r : {solve_mcnf_exact(net), solve_mcnf_heuristic(net)}) {
    ASSERT_TRUE(r.feasible());
    const auto plan = realize_circuits(net, r.allocation, in.mesh);
    const auto* c = plan.find(0);
    ASSERT_NE(c, nullptr);
    ASSERT_EQ(c->branches.size(), 2u);
    std::multiset<int> widths{c->branches[0].width, c->branches[1].width};
    EXPECT_EQ(widths, (std::multiset<int>{3, 2}));
  }
}

TEST(Greedy, KeyAndStraightLane) {
  Commodity c;
  c.demand = 6;
  c.src_xy = {0, 0};
  c.dst_xy = {2, 1};
  EXPECT_DOUBLE_EQ(greedy_key(c), 2.0);

  // straight flow takes the hardwired lane first, the rest on regular arcs
  auto in = make(mesh_cfg(1, 3, 8, 1, 4, 1000), {{0, 2, 6}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const auto r = route_greedy_baseline(net);
  ASSERT_TRUE(r.feasible());
  for (int l : net.straight_path(0)) {
    EXPECT_EQ(r.allocation.units[0][hardwired_arc(l)], 4);
    EXPECT_EQ(r.allocation.units[0][regular_arc(l)], 2);
  }
  EXPECT_TRUE(audit_allocation(net, r.allocation).empty());
}

TEST(Greedy, NeverSplits) {
  for (std::uint64_t seed = 200; seed < 240; ++seed) {
    const auto mi = oracle::micro_instance(seed, 3, 3, 4, 6);
    auto in = make(mi.cfg, mi.demands);
    const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
    const auto r = route_greedy_baseline(net);
    if (!r.feasible()) continue;
    EXPECT_TRUE(audit_allocation(net, r.allocation).empty());
    const auto plan = realize_circuits(net, r.allocation, in.mesh);
    for (const auto& c : plan.circuits) {
      std::set<std::vector<int>> paths;
      for (const auto& b : c.branches) paths.insert(b.nodes);
      EXPECT_EQ(paths.size(), 1u) << seed;
    }
  }
}

TEST(Widening, KeepsAllocationSoundAndGrows) {
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    const auto mi = oracle::micro_instance(seed, 4, 4, 6, 8);
    auto in = make(mi.cfg, mi.demands);
    auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
    auto r = solve_mcnf_heuristic(net);
    if (!r.feasible()) continue;
    std::vector<double> w(net.num_commodities(), 1.0);
    widen_allocation(net, r.allocation, w, 64);
    EXPECT_TRUE(audit_allocation(net, r.allocation).empty()) << seed;
    for (int k = 0; k < net.num_commodities(); ++k) {
      EXPECT_GE(net.commodities()[k].demand, in.demands[k].units);
    }
  }
}

TEST(Widening, FillsIdleLink) {
  // a lone one-hop flow ends up with the whole link
  auto in = make(mesh_cfg(1, 2, 16, 1, 4, 1000), {{0, 1, 2}});
  auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  auto r = solve_mcnf_heuristic(net);
  ASSERT_TRUE(r.feasible());
  const std::vector<double> w{1.0};
  widen_allocation(net, r.allocation, w, 16);
  EXPECT_EQ(net.commodities()[0].demand, 16);
}
