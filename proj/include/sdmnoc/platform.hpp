#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdmnoc {

/// Mesh coordinate: x is the column (grows eastward), y the row (grows southward).
struct Coord {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

int manhattan_dist(Coord a, Coord b);

enum class Port : std::uint8_t { Local = 0, North = 1, East = 2, South = 3, West = 4 };
inline constexpr int kNumPorts = 5;
inline constexpr std::array<Port, 4> kMeshPorts{Port::North, Port::East, Port::South, Port::West};

Port opposite(Port p);
std::string_view port_name(Port p);
Port parse_port(std::string_view name);

struct MeshConfig {
  int rows = 4;
  int cols = 4;
  int link_width = 128;         // N, bits
  int unit_width = 4;           // m, bits
  int hardwired_per_port = 0;   // L, wires
  std::uint64_t frequency_hz = 1'000'000;

  int units() const { return link_width / unit_width; }
  int hardwired_units() const { return hardwired_per_port / unit_width; }
  int configurable_units() const { return units() - hardwired_units(); }
  int num_nodes() const { return rows * cols; }
};

class PlatformError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> validate_mesh_config(const MeshConfig& cfg);

/// Bandwidth of one m-bit unit: one bit per wire per cycle.
std::uint64_t unit_bandwidth(const MeshConfig& cfg);

struct UnitRef {
  Port port = Port::Local;
  int unit = 0;
  friend bool operator==(const UnitRef&, const UnitRef&) = default;
};

/// Fixed crosspoint connection inside one router.
struct HardwiredEntry {
  int node = 0;
  UnitRef in;
  UnitRef out;
};

/// Hardwired crosspoints per router: (input port, hardwired unit) -> output.
/// Only units [0, H) of a mesh port take part in the pattern.
class HardwiredPattern {
 public:
  HardwiredPattern() = default;
  HardwiredPattern(int num_nodes, int hardwired_units);

  void set(const HardwiredEntry& e);
  std::optional<UnitRef> lookup(int node, Port in, int unit) const;
  bool matches(int node, UnitRef in, UnitRef out) const;
  std::vector<HardwiredEntry> entries() const;
  std::size_t size() const;
  int hardwired_units() const { return hardwired_units_; }

 private:
  int hardwired_units_ = 0;
  // [node][port][unit] -> packed output, -1 when absent
  std::vector<std::array<std::vector<int>, kNumPorts>> table_;
};

struct Link {
  int id = 0;
  int from = 0;
  int to = 0;
  Port out_port = Port::Local;  // at `from`
  Port in_port = Port::Local;   // at `to`
};

/// 2-D mesh of SDM routers. Immutable once built.
class Platform {
 public:
  /// Installs the straight-through pattern (unit k of input P drives unit k of
  /// opposite(P)) unless an explicit table is given.
  explicit Platform(const MeshConfig& cfg,
                    std::optional<std::vector<HardwiredEntry>> explicit_pattern = std::nullopt);

  const MeshConfig& config() const { return cfg_; }
  int num_nodes() const { return cfg_.num_nodes(); }
  int units() const { return cfg_.units(); }
  int hardwired_units() const { return cfg_.hardwired_units(); }

  Coord coord(int node) const { return {node % cfg_.cols, node / cfg_.cols}; }
  int node(Coord c) const { return c.y * cfg_.cols + c.x; }
  bool contains(Coord c) const {
    return c.x >= 0 && c.y >= 0 && c.x < cfg_.cols && c.y < cfg_.rows;
  }
  bool has_port(int node, Port p) const;
  /// Neighbour through mesh port p, or -1.
  int neighbor(int node, Port p) const;

  std::span<const Link> links() const { return links_; }
  /// Link leaving `node` through `out`, or -1.
  int link_from(int node, Port out) const;
  /// Link from `from` to adjacent `to`, or -1.
  int link_between(int from, int to) const;

  const HardwiredPattern& pattern() const { return pattern_; }
  bool straight_pattern() const { return straight_; }

 private:
  MeshConfig cfg_;
  std::vector<Link> links_;
  std::vector<std::array<int, kNumPorts>> out_link_;
  HardwiredPattern pattern_;
  bool straight_ = true;
};

struct PlatformSpec {
  MeshConfig config;
  std::optional<std::vector<HardwiredEntry>> pattern;
};

/// Platform config JSON:
/// `{"rows","cols","link_width","unit_width","hardwired_per_port","frequency_hz",
///   "hardwired_pattern": "straight" | [{"node","in_port","in_unit","out_port","out_unit"}]}`
PlatformSpec parse_platform_config(std::string_view text);
std::string render_platform_config(const PlatformSpec& spec);

/// Unit ownership per directed link; -1 marks a free unit.
class UnitLedger {
 public:
  UnitLedger(int num_links, int units);
  bool is_free(int link, int unit) const { return owner_[index(link, unit)] < 0; }
  int owner(int link, int unit) const { return owner_[index(link, unit)]; }
  /// Throws std::logic_error if the unit is already taken.
  void claim(int link, int unit, int flow);
  int used(int link) const;

 private:
  std::size_t index(int link, int unit) const {
    return static_cast<std::size_t>(link) * static_cast<std::size_t>(units_) +
           static_cast<std::size_t>(unit);
  }
  int units_;
  std::vector<int> owner_;
};

}  // namespace sdmnoc
