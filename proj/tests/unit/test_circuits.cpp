#include <gtest/gtest.h>

#include <numeric>
#include <set>

#include "brute_force.hpp"
#include "helpers.hpp"
#include "sdmnoc/circuits.hpp"
#include "sdmnoc/flow_network.hpp"

using namespace sdmnoc;
using testutil::mesh_cfg;

namespace {

struct Routed {
  Platform mesh;
  TaskGraph g;
  Mapping p;
  std::vector<UnitDemand> demands;
};

Routed setup(const MeshConfig& cfg, const std::vector<oracle::Demand>& ds) {
  Routed r{Platform(cfg), {}, {}, {}};
  r.g.num_tasks = cfg.num_nodes();
  for (const auto& d : ds) {
    r.g.flows.push_back({static_cast<int>(r.g.flows.size()), d.src, d.dst,
                         static_cast<std::int64_t>(d.units) * static_cast<std::int64_t>(unit_bandwidth(cfg))});
  }
  r.p.node_of_task.resize(cfg.num_nodes());
  std::iota(r.p.node_of_task.begin(), r.p.node_of_task.end(), 0);
  r.demands = compute_unit_demands(r.g, cfg);
  return r;
}

}  // namespace

TEST(Circuits, RealizedPlansPassAudit) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    const auto mi = oracle::micro_instance(seed, 4, 4, 6, 8);
    auto in = setup(mi.cfg, mi.demands);
    const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
    const auto r = solve_mcnf_heuristic(net);
    if (!r.feasible()) continue;
    ++checked;
    const auto plan = realize_circuits(net, r.allocation, in.mesh);
    EXPECT_TRUE(audit_circuit_plan(plan, in.mesh).empty()) << seed;
    EXPECT_EQ(plan.demotions, 0) << seed;
    ASSERT_EQ(plan.circuits.size(), mi.demands.size());
    for (std::size_t k = 0; k < mi.demands.size(); ++k) {
      const auto* c = plan.find(static_cast<int>(k));
      ASSERT_NE(c, nullptr);
      EXPECT_EQ(c->units(), mi.demands[k].units);
      for (const auto& b : c->branches) {
        EXPECT_EQ(b.nodes.front(), mi.demands[k].src);
        EXPECT_EQ(b.nodes.back(), mi.demands[k].dst);
        EXPECT_EQ(b.crosspoints.size(), static_cast<std::size_t>((b.hops() + 1) * b.width));
      }
    }
    // no unit of any link is held twice
    std::set<std::pair<int, int>> taken;
    for (const auto& c : plan.circuits) {
      for (const auto& b : c.branches) {
        for (int hop = 0; hop < b.hops(); ++hop) {
          for (int u : b.units[hop]) EXPECT_TRUE(taken.insert({b.links[hop], u}).second);
        }
      }
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(Circuits, HardwiredLaneTags) {
  auto in = setup(mesh_cfg(1, 4, 8, 1, 4, 1000), {{0, 3, 6}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const auto r = solve_mcnf_exact(net);
  ASSERT_TRUE(r.feasible());
  const auto plan = realize_circuits(net, r.allocation, in.mesh);
  const auto& c = plan.circuits.at(0);
  ASSERT_EQ(c.branches.size(), 2u);
  int lane = 0;
  for (const auto& b : c.branches) {
    if (!b.hardwired_lane) {
      EXPECT_EQ(b.width, 2);
      for (const auto& hop : b.units)
        for (int u : hop) EXPECT_GE(u, 4);
      continue;
    }
    ++lane;
    EXPECT_EQ(b.width, 4);
    for (const auto& hop : b.units)
      for (int u : hop) EXPECT_LT(u, 4);
  }
  EXPECT_EQ(lane, 1);
  // routers 1 and 2 are transit: 4 lane units each go through fixed crosspoints
  EXPECT_EQ(plan.crosspoints(CrosspointKind::Hardwired), 8);
  EXPECT_EQ(plan.crosspoints(CrosspointKind::Configurable), 4 * 2 + 2 * 4);
}

TEST(Circuits, RoundTrip) {
  auto in = setup(mesh_cfg(3, 3, 8, 1, 2, 1000), {{0, 8, 5}, {2, 6, 4}, {3, 5, 7}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const auto r = solve_mcnf_heuristic(net);
  ASSERT_TRUE(r.feasible());
  const auto plan = realize_circuits(net, r.allocation, in.mesh);
  const auto text = render_circuit_plan(plan, in.mesh);
  const auto again = parse_circuit_plan(text, in.mesh);
  EXPECT_EQ(render_circuit_plan(again, in.mesh), text);
  EXPECT_TRUE(audit_circuit_plan(again, in.mesh).empty());
  EXPECT_THROW(parse_circuit_plan("{\"circuits\": 3}", in.mesh), std::invalid_argument);
  EXPECT_THROW(parse_circuit_plan("[", in.mesh), std::invalid_argument);
}

TEST(Circuits, AuditCatchesSharedUnit) {
  auto in = setup(mesh_cfg(1, 3, 4, 1, 0, 1000), {{0, 2, 2}, {1, 2, 2}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const auto r = solve_mcnf_exact(net);
  ASSERT_TRUE(r.feasible());
  auto plan = realize_circuits(net, r.allocation, in.mesh);
  ASSERT_TRUE(audit_circuit_plan(plan, in.mesh).empty());
  // flow 1 rides the last link of flow 0; give it flow 0's units there
  auto& a = plan.circuits[0].branches[0];
  auto& b = plan.circuits[1].branches[0];
  b.units[0] = a.units[1];
  EXPECT_FALSE(audit_circuit_plan(plan, in.mesh).empty());
}

TEST(Circuits, AuditCatchesWrongTag) {
  auto in = setup(mesh_cfg(1, 3, 4, 1, 0, 1000), {{0, 2, 2}});
  const auto net = build_flow_network(in.mesh, in.p, in.g, in.demands);
  const auto r = solve_mcnf_exact(net);
  auto plan = realize_circuits(net, r.allocation, in.mesh);
  plan.circuits[0].branches[0].crosspoints[2].kind = CrosspointKind::Hardwired;
  EXPECT_FALSE(audit_circuit_plan(plan, in.mesh).empty());
}
