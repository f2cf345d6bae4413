#include "sdmnoc/platform.hpp"

#include <cstdlib>
#include <set>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

namespace sdmnoc {

using nlohmann::json;

int manhattan_dist(Coord a, Coord b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

Port opposite(Port p) {
  switch (p) {
    case Port::North: return Port::South;
    case Port::South: return Port::North;
    case Port::East: return Port::West;
    case Port::West: return Port::East;
    case Port::Local: return Port::Local;
  }
  return Port::Local;
}

std::string_view port_name(Port p) {
  switch (p) {
    case Port::Local: return "L";
    case Port::North: return "N";
    case Port::East: return "E";
    case Port::South: return "S";
    case Port::West: return "W";
  }
  return "?";
}

Port parse_port(std::string_view name) {
  if (name == "L") return Port::Local;
  if (name == "N") return Port::North;
  if (name == "E") return Port::East;
  if (name == "S") return Port::South;
  if (name == "W") return Port::West;
  throw PlatformError(fmt::format("unknown port \"{}\"", name));
}

std::vector<std::string> validate_mesh_config(const MeshConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.rows < 1 || cfg.cols < 1) out.push_back("mesh dimensions must be positive");
  if (cfg.link_width < 1) out.push_back("link_width must be positive");
  if (cfg.unit_width < 1 || cfg.unit_width > cfg.link_width) {
    out.push_back("unit_width must satisfy 1 <= m <= N");
  } else if (cfg.link_width % cfg.unit_width != 0) {
    out.push_back("unit_width must divide link_width");
  }
  if (cfg.hardwired_per_port < 0 || cfg.hardwired_per_port > cfg.link_width) {
    out.push_back("hardwired_per_port must satisfy 0 <= L <= N");
  } else if (cfg.unit_width > 0 && cfg.hardwired_per_port % cfg.unit_width != 0) {
    out.push_back("unit_width must divide hardwired_per_port");
  }
  if (cfg.frequency_hz == 0) out.push_back("frequency_hz must be positive");
  return out;
}

std::uint64_t unit_bandwidth(const MeshConfig& cfg) {
  return static_cast<std::uint64_t>(cfg.unit_width) * cfg.frequency_hz;
}

HardwiredPattern::HardwiredPattern(int num_nodes, int hardwired_units)
    : hardwired_units_(hardwired_units), table_(static_cast<std::size_t>(num_nodes)) {
  for (auto& ports : table_) {
    for (auto& units : ports) units.assign(static_cast<std::size_t>(hardwired_units), -1);
  }
}

void HardwiredPattern::set(const HardwiredEntry& e) {
  table_.at(static_cast<std::size_t>(e.node))
      .at(static_cast<std::size_t>(e.in.port))
      .at(static_cast<std::size_t>(e.in.unit)) =
      static_cast<int>(e.out.port) * hardwired_units_ + e.out.unit;
}

std::optional<UnitRef> HardwiredPattern::lookup(int node, Port in, int unit) const {
  if (node < 0 || static_cast<std::size_t>(node) >= table_.size()) return std::nullopt;
  if (unit < 0 || unit >= hardwired_units_) return std::nullopt;
  const int packed = table_[static_cast<std::size_t>(node)][static_cast<std::size_t>(in)]
                           [static_cast<std::size_t>(unit)];
  if (packed < 0) return std::nullopt;
  return UnitRef{static_cast<Port>(packed / hardwired_units_), packed % hardwired_units_};
}

bool HardwiredPattern::matches(int node, UnitRef in, UnitRef out) const {
  auto hit = lookup(node, in.port, in.unit);
  return hit && *hit == out;
}

std::vector<HardwiredEntry> HardwiredPattern::entries() const {
  std::vector<HardwiredEntry> out;
  for (std::size_t n = 0; n < table_.size(); ++n) {
    for (std::size_t p = 0; p < kNumPorts; ++p) {
      for (int k = 0; k < hardwired_units_; ++k) {
        if (auto hit = lookup(static_cast<int>(n), static_cast<Port>(p), k)) {
          out.push_back({static_cast<int>(n), {static_cast<Port>(p), k}, *hit});
        }
      }
    }
  }
  return out;
}

std::size_t HardwiredPattern::size() const { return entries().size(); }

Platform::Platform(const MeshConfig& cfg, std::optional<std::vector<HardwiredEntry>> explicit_pattern)
    : cfg_(cfg) {
  if (auto errors = validate_mesh_config(cfg); !errors.empty()) {
    throw PlatformError("invalid mesh config: " + errors.front());
  }
  const int n = num_nodes();
  out_link_.assign(static_cast<std::size_t>(n), {-1, -1, -1, -1, -1});
  for (int node = 0; node < n; ++node) {
    for (Port p : kMeshPorts) {
      const int nb = neighbor(node, p);
      if (nb < 0) continue;
      const int id = static_cast<int>(links_.size());
      links_.push_back(Link{id, node, nb, p, opposite(p)});
      out_link_[static_cast<std::size_t>(node)][static_cast<std::size_t>(p)] = id;
    }
  }

  const int h = hardwired_units();
  pattern_ = HardwiredPattern(n, h);
  if (!explicit_pattern) {
    for (int node = 0; node < n; ++node) {
      for (Port p : kMeshPorts) {
        if (!has_port(node, p) || !has_port(node, opposite(p))) continue;
        for (int k = 0; k < h; ++k) pattern_.set({node, {p, k}, {opposite(p), k}});
      }
    }
    return;
  }

  straight_ = false;
  std::set<std::tuple<int, Port, int>> driven;
  std::set<std::tuple<int, Port, int>> sourced;
  for (const auto& e : *explicit_pattern) {
    if (e.node < 0 || e.node >= n) throw PlatformError("hardwired entry names a missing node");
    if (e.in.port == Port::Local || e.out.port == Port::Local) {
      throw PlatformError("hardwired crosspoints connect mesh ports only");
    }
    if (!has_port(e.node, e.in.port) || !has_port(e.node, e.out.port)) {
      throw PlatformError(fmt::format("node {} has no port for hardwired entry", e.node));
    }
    if (e.in.port == e.out.port) {
      throw PlatformError(fmt::format("hardwired U-turn at node {}", e.node));
    }
    if (e.in.unit < 0 || e.in.unit >= h || e.out.unit < 0 || e.out.unit >= h) {
      throw PlatformError("hardwired entry uses a unit outside the hardwired range");
    }
    if (!driven.emplace(e.node, e.out.port, e.out.unit).second) {
      throw PlatformError(fmt::format("two hardwired crosspoints drive node {} port {} unit {}",
                                      e.node, port_name(e.out.port), e.out.unit));
    }
    if (!sourced.emplace(e.node, e.in.port, e.in.unit).second) {
      throw PlatformError("an input unit has two hardwired crosspoints");
    }
    pattern_.set(e);
  }
}

bool Platform::has_port(int node, Port p) const {
  if (p == Port::Local) return true;
  return neighbor(node, p) >= 0;
}

int Platform::neighbor(int node, Port p) const {
  Coord c = coord(node);
  switch (p) {
    case Port::North: --c.y; break;
    case Port::South: ++c.y; break;
    case Port::East: ++c.x; break;
    case Port::West: --c.x; break;
    case Port::Local: return -1;
  }
  return contains(c) ? this->node(c) : -1;
}

int Platform::link_from(int node, Port out) const {
  return out_link_.at(static_cast<std::size_t>(node))[static_cast<std::size_t>(out)];
}

int Platform::link_between(int from, int to) const {
  for (Port p : kMeshPorts) {
    if (neighbor(from, p) == to) return link_from(from, p);
  }
  return -1;
}

namespace {

int get_int(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_number_integer()) {
    throw PlatformError(fmt::format("platform field \"{}\" must be an integer", key));
  }
  return it->get<int>();
}

}  // namespace

PlatformSpec parse_platform_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw PlatformError(fmt::format("platform syntax error at byte {}: {}", e.byte, e.what()));
  }
  if (!doc.is_object()) throw PlatformError("platform config must be an object");
  PlatformSpec spec;
  auto& c = spec.config;
  c.rows = get_int(doc, "rows");
  c.cols = get_int(doc, "cols");
  c.link_width = get_int(doc, "link_width");
  c.unit_width = get_int(doc, "unit_width");
  c.hardwired_per_port = get_int(doc, "hardwired_per_port");
  auto f = doc.find("frequency_hz");
  if (f == doc.end() || !f->is_number_integer() || f->get<std::int64_t>() <= 0) {
    throw PlatformError("platform field \"frequency_hz\" must be a positive integer");
  }
  c.frequency_hz = f->get<std::uint64_t>();
  if (auto errors = validate_mesh_config(c); !errors.empty()) {
    throw PlatformError("invalid mesh config: " + errors.front());
  }

  auto pat = doc.find("hardwired_pattern");
  if (pat == doc.end() || (pat->is_string() && pat->get<std::string>() == "straight")) {
    return spec;
  }
  if (!pat->is_array()) throw PlatformError("hardwired_pattern must be \"straight\" or a table");
  std::vector<HardwiredEntry> entries;
  for (const auto& e : *pat) {
    HardwiredEntry h;
    h.node = get_int(e, "node");
    h.in = {parse_port(e.at("in_port").get<std::string>()), get_int(e, "in_unit")};
    h.out = {parse_port(e.at("out_port").get<std::string>()), get_int(e, "out_unit")};
    entries.push_back(h);
  }
  spec.pattern = std::move(entries);
  return spec;
}

std::string render_platform_config(const PlatformSpec& spec) {
  const auto& c = spec.config;
  json doc{{"rows", c.rows},
           {"cols", c.cols},
           {"link_width", c.link_width},
           {"unit_width", c.unit_width},
           {"hardwired_per_port", c.hardwired_per_port},
           {"frequency_hz", c.frequency_hz}};
  if (!spec.pattern) {
    doc["hardwired_pattern"] = "straight";
  } else {
    json table = json::array();
    for (const auto& e : *spec.pattern) {
      table.push_back({{"node", e.node},
                       {"in_port", port_name(e.in.port)},
                       {"in_unit", e.in.unit},
                       {"out_port", port_name(e.out.port)},
                       {"out_unit", e.out.unit}});
    }
    doc["hardwired_pattern"] = std::move(table);
  }
  return doc.dump(2) + "\n";
}

UnitLedger::UnitLedger(int num_links, int units)
    : units_(units),
      owner_(static_cast<std::size_t>(num_links) * static_cast<std::size_t>(units), -1) {}

void UnitLedger::claim(int link, int unit, int flow) {
  auto& slot = owner_.at(index(link, unit));
  if (slot >= 0) {
    throw std::logic_error(
        fmt::format("unit {} of link {} already owned by flow {}", unit, link, slot));
  }
  slot = flow;
}

int UnitLedger::used(int link) const {
  int n = 0;
  for (int u = 0; u < units_; ++u) n += owner_[index(link, u)] >= 0 ? 1 : 0;
  return n;
}

}  // namespace sdmnoc
