#include <gtest/gtest.h>

#include "helpers.hpp"
#include "sdmnoc/platform.hpp"

using namespace sdmnoc;
using testutil::mesh_cfg;

TEST(Platform, LinkCountAndNeighbours) {
  for (auto [r, c] : {std::pair{1, 1}, {2, 3}, {4, 4}, {6, 4}, {9, 9}}) {
    const Platform mesh(mesh_cfg(r, c, 128, 4, 0, 1'000'000));
    EXPECT_EQ(static_cast<int>(mesh.links().size()), 2 * (r * (c - 1) + c * (r - 1)));
    for (const auto& l : mesh.links()) {
      EXPECT_EQ(manhattan_dist(mesh.coord(l.from), mesh.coord(l.to)), 1);
      EXPECT_EQ(mesh.neighbor(l.from, l.out_port), l.to);
      EXPECT_EQ(mesh.neighbor(l.to, l.in_port), l.from);
      EXPECT_EQ(mesh.link_between(l.from, l.to), l.id);
      EXPECT_EQ(mesh.link_from(l.from, l.out_port), l.id);
    }
  }
}

TEST(Platform, CornerPorts) {
  const Platform mesh(mesh_cfg(3, 3, 8, 1, 0, 1));
  EXPECT_FALSE(mesh.has_port(0, Port::North));
  EXPECT_FALSE(mesh.has_port(0, Port::West));
  EXPECT_TRUE(mesh.has_port(0, Port::East));
  EXPECT_TRUE(mesh.has_port(0, Port::Local));
  EXPECT_EQ(mesh.neighbor(4, Port::North), 1);
  EXPECT_EQ(mesh.neighbor(4, Port::South), 7);
  EXPECT_EQ(mesh.coord(5), (Coord{2, 1}));
}

TEST(Platform, UnitCounts) {
  const auto c = mesh_cfg(4, 4, 128, 4, 48, 1);
  EXPECT_EQ(c.units(), 32);
  EXPECT_EQ(c.hardwired_units(), 12);
  EXPECT_EQ(c.configurable_units(), 20);
  EXPECT_EQ(unit_bandwidth(mesh_cfg(1, 1, 128, 4, 0, 1'000'000)), 4'000'000u);
}

TEST(Platform, StraightPatternSize) {
  // H entries per mesh input port whose opposite port exists
  const int r = 3, c = 4, h = 3;
  const Platform mesh(mesh_cfg(r, c, 16, 2, 2 * h, 1));
  std::size_t expected = 0;
  for (int n = 0; n < r * c; ++n) {
    for (Port p : kMeshPorts) {
      if (mesh.has_port(n, p) && mesh.has_port(n, opposite(p))) expected += h;
    }
  }
  EXPECT_EQ(mesh.pattern().size(), expected);
  EXPECT_TRUE(mesh.straight_pattern());
  const int mid = mesh.node({1, 1});
  EXPECT_EQ(mesh.pattern().lookup(mid, Port::West, 2), (UnitRef{Port::East, 2}));
  EXPECT_FALSE(mesh.pattern().lookup(mid, Port::West, 3).has_value());
  EXPECT_FALSE(mesh.pattern().lookup(0, Port::East, 0).has_value());
}

TEST(Platform, RejectsBadConfig) {
  EXPECT_THROW(Platform(mesh_cfg(2, 2, 128, 3, 0, 1)), PlatformError);
  EXPECT_THROW(Platform(mesh_cfg(2, 2, 128, 4, 6, 1)), PlatformError);
  EXPECT_THROW(Platform(mesh_cfg(2, 2, 128, 4, 132, 1)), PlatformError);
  EXPECT_THROW(Platform(mesh_cfg(0, 2, 128, 4, 0, 1)), PlatformError);
  EXPECT_THROW(Platform(mesh_cfg(2, 2, 128, 4, 0, 0)), PlatformError);
  EXPECT_EQ(validate_mesh_config(mesh_cfg(0, 2, 128, 3, 6, 0)).size(), 3u);
}

TEST(Platform, ExplicitPatternChecks) {
  const auto cfg = mesh_cfg(2, 2, 4, 1, 2, 1);
  std::vector<HardwiredEntry> turn{{0, {Port::South, 0}, {Port::East, 1}}};
  // node 0 is the north-west corner: it has East and South ports
  const Platform ok(cfg, turn);
  EXPECT_FALSE(ok.straight_pattern());
  EXPECT_TRUE(ok.pattern().matches(0, {Port::South, 0}, {Port::East, 1}));
  EXPECT_EQ(ok.pattern().size(), 1u);

  auto bad = turn;
  bad.push_back({0, {Port::South, 1}, {Port::East, 1}});
  EXPECT_THROW(Platform(cfg, bad), PlatformError);
  EXPECT_THROW(Platform(cfg, std::vector<HardwiredEntry>{{0, {Port::North, 0}, {Port::East, 0}}}), PlatformError);
  EXPECT_THROW(Platform(cfg, std::vector<HardwiredEntry>{{0, {Port::South, 2}, {Port::East, 0}}}), PlatformError);
  EXPECT_THROW(Platform(cfg, std::vector<HardwiredEntry>{{0, {Port::Local, 0}, {Port::East, 0}}}), PlatformError);
}

TEST(Platform, ConfigRoundTrip) {
  PlatformSpec spec;
  spec.config = mesh_cfg(2, 2, 4, 1, 2, 1000);
  spec.pattern = std::vector<HardwiredEntry>{{3, {Port::North, 1}, {Port::West, 0}}};
  const auto again = parse_platform_config(render_platform_config(spec));
  EXPECT_EQ(render_platform_config(again), render_platform_config(spec));
  EXPECT_THROW(parse_platform_config(R"({"rows": 2})"), PlatformError);
  EXPECT_THROW(parse_platform_config("{"), PlatformError);
  const auto straight = parse_platform_config(
      R"({"rows":4,"cols":4,"link_width":128,"unit_width":4,"hardwired_per_port":48,"frequency_hz":5})");
  EXPECT_FALSE(straight.pattern.has_value());
}

TEST(Platform, LedgerClaims) {
  UnitLedger ledger(3, 4);
  EXPECT_TRUE(ledger.is_free(1, 2));
  ledger.claim(1, 2, 7);
  EXPECT_EQ(ledger.owner(1, 2), 7);
  EXPECT_EQ(ledger.used(1), 1);
  EXPECT_THROW(ledger.claim(1, 2, 8), std::logic_error);
}
