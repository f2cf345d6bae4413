#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "helpers.hpp"
#include "sdmnoc/frequency.hpp"
#include "sdmnoc/sim.hpp"

using namespace sdmnoc;
using testutil::mesh_cfg;

namespace {

Workload one_flow(int flow, std::vector<std::int64_t> cycles, int bits) {
  Workload w;
  w.packet_bits = bits;
  w.flows.push_back({flow, 0, 0, std::move(cycles)});
  return w;
}

RoutedDesign routed(const TaskGraph& g, const Platform& mesh, const Mapping& p,
                    SolverChoice s = SolverChoice::Exact) {
  RouteOptions o;
  o.solver = s;
  auto d = route_design(g, mesh, p, o);
  if (!d) throw std::runtime_error("test instance did not route");
  return *d;
}

/// Straight full-width circuit over `hops` hops on a 1 x (hops+1) row.
struct Line {
  Platform mesh;
  TaskGraph g;
  Mapping p;
  RoutedDesign d;
};

Line full_width_line(int hops) {
  const Platform mesh(mesh_cfg(1, hops + 1, 128, 4, 0, 1'000'000'000));
  auto g = testutil::graph(2, {{0, 1, 128'000'000'000}});
  auto p = testutil::place(mesh, {{0, 0}, {hops, 0}});
  auto d = routed(g, mesh, p);
  return {mesh, g, p, d};
}

/// 2x2 mesh where flow 0 can only fit as 3 + 2 units.
struct Split {
  Platform mesh{mesh_cfg(2, 2, 8, 1, 0, 1000)};
  TaskGraph g = testutil::graph(4, {{0, 3, 5000}, {0, 1, 5000}, {0, 2, 6000}});
  Mapping p = testutil::place(mesh, {{0, 0}, {1, 0}, {0, 1}, {1, 1}});
};

}  // namespace

TEST(SdmSim, FullWidthExamples) {
  const auto line = full_width_line(4);
  ASSERT_EQ(line.d.plan.circuits.at(0).units(), 32);
  // 1024 bits over 128-bit circuit: 8 chunks, 4 hops
  auto r = simulate_sdm(line.mesh, line.d.plan, one_flow(0, {5}, 1024), 100);
  ASSERT_EQ(r.packets.size(), 1u);
  EXPECT_EQ(r.packets[0].latency(), 11);
  // single chunk: latency equals hop count
  r = simulate_sdm(line.mesh, line.d.plan, one_flow(0, {0}, 128), 100);
  EXPECT_EQ(r.packets.at(0).latency(), 4);
  EXPECT_EQ(sdm_closed_form({0}, 1024, 128, 4), (std::vector<std::int64_t>{11}));
}

TEST(SdmSim, QueueingMatchesHandComputation) {
  const auto line = full_width_line(2);
  const auto r = simulate_sdm(line.mesh, line.d.plan, one_flow(0, {0, 1, 2, 40}, 1024), 200);
  ASSERT_EQ(r.packets.size(), 4u);
  // S = 8, H = 2: starts at 0, 8, 16, 40
  const std::int64_t expected[] = {9, 16, 23, 9};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(r.packets[i].latency(), expected[i]);
  const auto cf = sdm_closed_form({0, 1, 2, 40}, 1024, 128, 2);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(cf[i], expected[i]);
}

TEST(SdmSim, SplitCircuitChunksLandTogether) {
  Split s;
  const auto d = routed(s.g, s.mesh, s.p);
  ASSERT_EQ(d.plan.find(0)->branches.size(), 2u);
  // 5 bits per cycle: 20 bits is 4 chunks over 2 hops
  const auto r = simulate_sdm(s.mesh, d.plan, one_flow(0, {3, 50}, 20), 100);
  ASSERT_EQ(r.packets.size(), 2u);
  EXPECT_EQ(r.packets[0].latency(), 4 + 2 - 1);
  EXPECT_EQ(r.multipath_chunks, 8u);
  EXPECT_EQ(r.simultaneity_violations, 0u);
  EXPECT_EQ(sdm_closed_form({0}, 20, 5, 3), (std::vector<std::int64_t>{6}));
}

TEST(SdmSim, UnitActivityConservation) {
  Split s;
  const auto d = routed(s.g, s.mesh, s.p);
  Workload w;
  w.packet_bits = 37;
  w.flows.push_back({0, 0, 0, {0, 5, 9, 30}});
  w.flows.push_back({1, 0, 0, {2, 3}});
  w.flows.push_back({2, 0, 0, {1}});
  const auto r = simulate_sdm(s.mesh, d.plan, w, 100);
  ASSERT_EQ(r.delivered(), 7);
  std::uint64_t active = 0, expect_active = 0, expect_bits = 0, expect_regs = 0;
  for (auto a : r.unit_active) active += a;
  for (const auto& fs : w.flows) {
    const auto* c = d.plan.find(fs.flow_id);
    const int width = c->units();
    const std::uint64_t chunks = (37 + width - 1) / width;
    const std::uint64_t n = fs.cycles.size();
    expect_active += n * chunks * width * c->hops();
    expect_bits += n * chunks * width * c->hops();  // m = 1
    expect_regs += n * chunks * c->hops();
  }
  EXPECT_EQ(active, expect_active);
  EXPECT_EQ(r.link_bit_hops, expect_bits);
  const auto ev = r.total_events();
  EXPECT_EQ(ev.buffer_writes, expect_regs);
  EXPECT_EQ(ev.buffer_reads, expect_regs);
  EXPECT_EQ(ev.arbitrations, 0u);
  EXPECT_EQ(ev.route_computes, 0u);
}

TEST(SdmSim, MissingCircuitThrows) {
  const auto line = full_width_line(1);
  EXPECT_THROW(simulate_sdm(line.mesh, line.d.plan, one_flow(7, {0}, 64), 10), SimError);
}

TEST(WormholeSim, ZeroLoadLatency) {
  for (int h = 1; h <= 6; ++h) {
    const auto line = full_width_line(h);
    const auto r = simulate_wormhole(line.mesh, line.p, line.g, one_flow(0, {3}, 1024), 200);
    ASSERT_EQ(r.packets.size(), 1u);
    EXPECT_EQ(r.packets[0].latency(), 3 * h + 7) << h;
    EXPECT_EQ(wormhole_zero_load(h, 8), 3 * h + 7);
    EXPECT_FALSE(r.saturated);
  }
}

TEST(WormholeSim, RejectsPartialFlits) {
  const auto line = full_width_line(2);
  EXPECT_THROW(simulate_wormhole(line.mesh, line.p, line.g, one_flow(0, {0}, 100), 50), SimError);
}

TEST(WormholeSim, DisjointFlowsDoNotInteract) {
  const Platform mesh(mesh_cfg(2, 4, 128, 4, 0, 1'000'000'000));
  const auto g = testutil::graph(4, {{0, 1, 4'000'000'000}, {2, 3, 6'000'000'000}});
  const auto p = testutil::place(mesh, {{0, 0}, {3, 0}, {3, 1}, {0, 1}});
  const auto w = generate_workload(g, mesh.config(), 4000, 5);
  const auto both = simulate_wormhole(mesh, p, g, w, 4000);
  Workload only0 = w, only1 = w;
  only0.flows.pop_back();
  only1.flows.erase(only1.flows.begin());
  const auto a = simulate_wormhole(mesh, p, g, only0, 4000);
  const auto b = simulate_wormhole(mesh, p, g, only1, 4000);
  ASSERT_EQ(both.flows.size(), 2u);
  EXPECT_DOUBLE_EQ(both.flows[0].avg_latency, a.flows[0].avg_latency);
  EXPECT_DOUBLE_EQ(both.flows[1].avg_latency, b.flows[0].avg_latency);
  EXPECT_DOUBLE_EQ(a.flows[0].avg_latency, 3 * 3 + 7);
}

TEST(WormholeSim, OverloadSaturates) {
  const Platform mesh(mesh_cfg(1, 3, 128, 4, 0, 1'000'000'000));
  // two sources push 0.75 of a link each into the same final link
  const auto g = testutil::graph(3, {{0, 2, 96'000'000'000}, {1, 2, 96'000'000'000}});
  const auto p = testutil::place(mesh, {{0, 0}, {1, 0}, {2, 0}});
  const auto w = generate_workload(g, mesh.config(), 4000, 1);
  EXPECT_TRUE(simulate_wormhole(mesh, p, g, w, 4000).saturated);
}

TEST(CrossCheck, FullWidthCircuitBeatsWormhole) {
  for (int h = 1; h <= 6; ++h) {
    const auto line = full_width_line(h);
    for (int bits : {128, 512, 1024, 4096}) {
      const auto w = one_flow(0, {0}, bits);
      const auto s = simulate_sdm(line.mesh, line.d.plan, w, 100);
      const auto b = simulate_wormhole(line.mesh, line.p, line.g, w, 100);
      EXPECT_LT(s.packets.at(0).latency(), b.packets.at(0).latency()) << h << " " << bits;
    }
  }
}

TEST(Workload, PeriodicSchedule) {
  const auto cfg = mesh_cfg(1, 2, 128, 4, 0, 1'000'000'000);
  // 1024 bits at 1 GHz, 3e9 b/s: 341.33 cycles rounds to 341
  const auto g = testutil::graph(2, {{0, 1, 3'000'000'000}, {1, 0, 128'000'000'000}});
  const auto w = generate_workload(g, cfg, 10'000, 42);
  ASSERT_EQ(w.flows.size(), 2u);
  EXPECT_EQ(w.flows[0].period, 341);
  EXPECT_EQ(w.flows[1].period, 8);
  for (const auto& f : w.flows) {
    EXPECT_GE(f.phase, 0);
    EXPECT_LT(f.phase, f.period);
    ASSERT_FALSE(f.cycles.empty());
    EXPECT_EQ(f.cycles.front(), f.phase);
    for (std::size_t i = 1; i < f.cycles.size(); ++i) EXPECT_EQ(f.cycles[i] - f.cycles[i - 1], f.period);
    EXPECT_LT(f.cycles.back(), 10'000);
    EXPECT_GE(f.cycles.back() + f.period, 10'000);
  }
  EXPECT_TRUE(w.warnings.empty());
  const auto again = generate_workload(g, cfg, 10'000, 42);
  EXPECT_EQ(again.flows[0].cycles, w.flows[0].cycles);
}

TEST(Workload, TooFastFlowWarns) {
  const auto cfg = mesh_cfg(1, 2, 128, 4, 0, 1'000'000'000);
  const auto g = testutil::graph(2, {{0, 1, 500'000'000'000}});
  EXPECT_FALSE(generate_workload(g, cfg, 1000, 1).warnings.empty());
}

TEST(Workload, BernoulliMeanRate) {
  const auto cfg = mesh_cfg(1, 2, 128, 4, 0, 1'000'000'000);
  const auto g = testutil::graph(2, {{0, 1, 10'240'000'000}});  // period 100
  WorkloadOptions o;
  o.mode = InjectionMode::Bernoulli;
  const auto w = generate_workload(g, cfg, 200'000, 9, o);
  const double n = static_cast<double>(w.flows[0].cycles.size());
  // mean 2000, sd about 44
  EXPECT_NEAR(n, 2000.0, 200.0);
  EXPECT_THROW(generate_workload(g, cfg, 0, 1), std::invalid_argument);
}

TEST(SimOutput, CsvHeaders) {
  const auto line = full_width_line(2);
  const auto r = simulate_sdm(line.mesh, line.d.plan, one_flow(0, {0, 20}, 1024), 100);
  EXPECT_EQ(render_flow_csv(r).rfind("flow_id,packets,avg_latency,max_latency\n0,2,9", 0), 0u);
  const auto links = render_link_csv(r);
  EXPECT_EQ(links.rfind("link_id,unit_id,active_cycles\n", 0), 0u);
  // 32 units on each of 2 links, each busy 16 cycles
  EXPECT_EQ(std::count(links.begin(), links.end(), '\n'), 1 + 64);
  EXPECT_NE(render_sim_json(r).find("\"design\""), std::string::npos);
}
