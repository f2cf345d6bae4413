#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <set>

#include "sdmnoc/ctg.hpp"

using namespace sdmnoc;

TEST(Ctg, ParsesFlowsInOrder) {
  const auto g = parse_ctg(R"({"tasks": 3, "name": "tri",
    "flows": [{"src": 0, "dst": 1, "demand_bps": 100}, {"src": 2, "dst": 0, "demand_bps": 7}]})");
  EXPECT_EQ(g.num_tasks, 3);
  EXPECT_EQ(g.name, "tri");
  ASSERT_EQ(g.flows.size(), 2u);
  EXPECT_EQ(g.flows[1], (Flow{1, 2, 0, 7}));
  EXPECT_EQ(g.total_demand(0), 107);
}

TEST(Ctg, RenderRoundTrips) {
  const auto g = generate_synthetic_ctg(9, 14, 10, 1000, 5);
  EXPECT_EQ(parse_ctg(render_ctg(g)), g);
}

TEST(Ctg, RejectsFloatDemand) {
  EXPECT_THROW(parse_ctg(R"({"tasks": 2, "flows": [{"src": 0, "dst": 1, "demand_bps": 1.5}]})"), CtgError);
}

TEST(Ctg, SyntaxErrorCarriesOffset) {
  try {
    parse_ctg(R"({"tasks": 2, "flows": [}  )");
    FAIL();
  } catch (const CtgError& e) {
    EXPECT_GT(e.position(), 0u);
  }
}

TEST(Ctg, SemanticErrorNamesFlow) {
  const char* bad[] = {
      R"({"tasks": 2, "flows": [{"src": 0, "dst": 1, "demand_bps": 1}, {"src": 1, "dst": 1, "demand_bps": 1}]})",
      R"({"tasks": 2, "flows": [{"src": 0, "dst": 1, "demand_bps": 1}, {"src": 0, "dst": 2, "demand_bps": 1}]})",
      R"({"tasks": 2, "flows": [{"src": 0, "dst": 1, "demand_bps": 1}, {"src": 0, "dst": 1, "demand_bps": 3}]})",
      R"({"tasks": 2, "flows": [{"src": 0, "dst": 1, "demand_bps": 1}, {"src": 1, "dst": 0, "demand_bps": 0}]})",
  };
  for (const char* text : bad) {
    try {
      parse_ctg(text);
      ADD_FAILURE() << text;
    } catch (const CtgError& e) {
      EXPECT_EQ(e.position(), 1u) << text;
    }
  }
}

TEST(Ctg, ValidateListsEveryProblem) {
  TaskGraph g;
  g.num_tasks = 2;
  g.flows = {{0, 0, 0, 5}, {1, 0, 3, -1}};
  EXPECT_EQ(validate_ctg(g).size(), 3u);
}

TEST(Ctg, SyntheticIsSeededAndConnected) {
  const auto a = generate_synthetic_ctg(27, 36, 64, 4096, 11);
  EXPECT_EQ(a, generate_synthetic_ctg(27, 36, 64, 4096, 11));
  EXPECT_NE(a, generate_synthetic_ctg(27, 36, 64, 4096, 12));
  EXPECT_TRUE(validate_ctg(a).empty());
  EXPECT_EQ(a.flows.size(), 36u);
  for (const auto& f : a.flows) {
    EXPECT_GE(f.demand_bps, 64);
    EXPECT_LE(f.demand_bps, 4096);
  }
  // weak connectivity by BFS on the undirected view
  std::map<int, std::set<int>> adj;
  for (const auto& f : a.flows) {
    adj[f.src].insert(f.dst);
    adj[f.dst].insert(f.src);
  }
  std::set<int> seen{0};
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    const int t = q.front();
    q.pop();
    for (int n : adj[t]) {
      if (seen.insert(n).second) q.push(n);
    }
  }
  EXPECT_EQ(seen.size(), 27u);
}

TEST(Ctg, SyntheticRejectsTooManyFlows) {
  EXPECT_THROW(generate_synthetic_ctg(3, 7, 1, 2, 1), std::invalid_argument);
  EXPECT_NO_THROW(generate_synthetic_ctg(3, 6, 1, 2, 1));
}

TEST(Ctg, PresetShapes) {
  // task count, flow count, mesh
  const std::map<std::string, std::array<int, 4>> expected{
      {"mwd", {13, 15, 4, 4}},    {"vopd", {16, 21, 4, 4}},    {"mms", {27, 36, 5, 6}},
      {"gsm-dec", {48, 73, 7, 7}}, {"gsm-enc", {36, 56, 6, 6}}, {"robot", {81, 118, 9, 9}},
      {"telecom", {24, 25, 6, 4}}, {"auto", {22, 25, 6, 4}},
  };
  ASSERT_EQ(benchmark_presets().size(), expected.size());
  for (const auto& p : benchmark_presets()) {
    const auto& e = expected.at(std::string(p.key));
    EXPECT_EQ(p.tasks, e[0]);
    EXPECT_EQ(p.flows, e[1]);
    EXPECT_EQ(p.rows * p.cols, e[2] * e[3]);
    EXPECT_LE(p.tasks, p.rows * p.cols);
    const auto g = preset_ctg(p, 1, 10, 3);
    EXPECT_EQ(g.num_tasks, p.tasks);
    EXPECT_EQ(static_cast<int>(g.flows.size()), p.flows);
  }
  EXPECT_THROW(find_preset("nope"), std::invalid_argument);
}
