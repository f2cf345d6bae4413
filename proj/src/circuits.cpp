#include "sdmnoc/circuits.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

namespace sdmnoc {

int FlowCircuit::units() const {
  int n = 0;
  for (const auto& b : branches) n += b.width;
  return n;
}

const FlowCircuit* CircuitPlan::find(int flow_id) const {
  for (const auto& c : circuits) {
    if (c.flow_id == flow_id) return &c;
  }
  return nullptr;
}

int CircuitPlan::crosspoints(CrosspointKind kind) const {
  int n = 0;
  for (const auto& c : circuits) {
    for (const auto& b : c.branches) {
      for (const auto& x : b.crosspoints) n += x.kind == kind ? 1 : 0;
    }
  }
  return n;
}

namespace {

Branch branch_from_links(const Platform& mesh, int source, std::vector<int> links, int width) {
  Branch b;
  b.nodes.push_back(source);
  for (int l : links) b.nodes.push_back(mesh.links()[l].to);
  b.links = std::move(links);
  b.width = width;
  b.units.assign(b.links.size(), {});
  return b;
}

/// Peels paths off the commodity's regular arc flow, widest arc first.
std::vector<Branch> decompose(const FlowNetwork& net, int k, const std::vector<int>& row) {
  const auto& c = net.commodities()[k];
  const auto& mesh = net.mesh();
  std::vector<int> rem(row);
  const int sx = (c.dx() > 0) - (c.dx() < 0), sy = (c.dy() > 0) - (c.dy() < 0);
  std::vector<Branch> out;
  while (true) {
    std::vector<int> links;
    Coord at = c.src_xy;
    int width = std::numeric_limits<int>::max();
    while (at != c.dst_xy) {
      int best = -1;
      Coord next = at;
      for (Coord cand : {Coord{at.x + sx, at.y}, Coord{at.x, at.y + sy}}) {
        if (cand == at || !c.in_rectangle(cand)) continue;
        const int l = mesh.link_between(mesh.node(at), mesh.node(cand));
        if (rem[regular_arc(l)] > 0 && (best < 0 || rem[regular_arc(l)] > rem[regular_arc(best)])) {
          best = l;
          next = cand;
        }
      }
      if (best < 0) break;
      links.push_back(best);
      width = std::min(width, rem[regular_arc(best)]);
      at = next;
    }
    if (links.empty()) break;
    if (at != c.dst_xy) throw RealizationError(fmt::format("flow {} arc flow is not conserved", c.flow_id));
    for (int l : links) rem[regular_arc(l)] -= width;
    out.push_back(branch_from_links(mesh, c.source, std::move(links), width));
  }
  return out;
}

void take_configurable(UnitLedger& ledger, Branch& b, int hop, int count, int flow, int h, int u) {
  for (int unit = h; unit < u && count > 0; ++unit) {
    if (!ledger.is_free(b.links[hop], unit)) continue;
    ledger.claim(b.links[hop], unit, flow);
    b.units[hop].push_back(unit);
    --count;
  }
  if (count > 0) {
    throw RealizationError(
        fmt::format("link {} has no configurable unit left for flow {}", b.links[hop], flow));
  }
}

/// Unit chain of a hardwired lane starting at `unit` on the first link, or
/// empty when the pattern leaves the path or a unit is taken.
std::vector<int> lane_chain(const Platform& mesh, const UnitLedger& ledger, const Branch& b, int unit) {
  std::vector<int> chain;
  if (!ledger.is_free(b.links[0], unit)) return {};
  chain.push_back(unit);
  for (int hop = 1; hop < b.hops(); ++hop) {
    const auto& prev = mesh.links()[b.links[hop - 1]];
    const auto& next = mesh.links()[b.links[hop]];
    const auto out = mesh.pattern().lookup(b.nodes[hop], prev.in_port, chain.back());
    if (!out || out->port != next.out_port || out->unit >= mesh.hardwired_units() ||
        !ledger.is_free(next.id, out->unit)) {
      return {};
    }
    chain.push_back(out->unit);
  }
  return chain;
}

void build_crosspoints(const Platform& mesh, Branch& b, int lane_offset) {
  b.crosspoints.clear();
  const int hops = b.hops();
  for (int r = 0; r <= hops; ++r) {
    for (int j = 0; j < b.width; ++j) {
      Crosspoint x;
      x.node = b.nodes[r];
      x.in = r == 0 ? UnitRef{Port::Local, lane_offset + j}
                    : UnitRef{mesh.links()[b.links[r - 1]].in_port, b.units[r - 1][j]};
      x.out = r == hops ? UnitRef{Port::Local, lane_offset + j}
                        : UnitRef{mesh.links()[b.links[r]].out_port, b.units[r][j]};
      const bool transit = r > 0 && r < hops;
      x.kind = transit && mesh.pattern().matches(x.node, x.in, x.out) ? CrosspointKind::Hardwired
                                                                      : CrosspointKind::Configurable;
      b.crosspoints.push_back(x);
    }
  }
}

}  // namespace

CircuitPlan realize_circuits(const FlowNetwork& net, const Allocation& a, const Platform& mesh) {
  CircuitPlan plan;
  plan.unit_width = mesh.config().unit_width;
  plan.units_per_link = mesh.units();
  plan.hardwired_units = mesh.hardwired_units();
  const int u = mesh.units(), h = mesh.hardwired_units();
  UnitLedger ledger(static_cast<int>(mesh.links().size()), u);

  struct LaneRef {
    int circuit;
    int branch;
  };
  std::vector<LaneRef> lanes;

  for (int k = 0; k < net.num_commodities(); ++k) {
    const auto& c = net.commodities()[k];
    FlowCircuit fc;
    fc.flow_id = c.flow_id;
    fc.source = c.source;
    fc.sink = c.sink;
    fc.requested_units = c.demand;
    const auto& row = a.units[k];
    if (c.hops() > 0 && c.straight()) {
      const auto path = net.straight_path(k);
      const int lane = row[hardwired_arc(path.front())];
      if (lane > 0) {
        fc.branches.push_back(branch_from_links(mesh, c.source, path, lane));
        fc.branches.back().hardwired_lane = true;
        lanes.push_back({k, 0});
      }
    }
    for (auto& b : decompose(net, k, row)) fc.branches.push_back(std::move(b));
    plan.circuits.push_back(std::move(fc));
  }

  for (auto& fc : plan.circuits) {
    for (auto& b : fc.branches) {
      if (b.hardwired_lane) continue;
      for (int hop = 0; hop < b.hops(); ++hop) take_configurable(ledger, b, hop, b.width, fc.flow_id, h, u);
    }
  }

  // Lanes sharing a row or column in the same direction, in travel order.
  auto lane_key = [&](const LaneRef& r) {
    const auto& fc = plan.circuits[r.circuit];
    const Coord s = mesh.coord(fc.source), t = mesh.coord(fc.sink);
    const int sx = (t.x > s.x) - (t.x < s.x), sy = (t.y > s.y) - (t.y < s.y);
    const int line = sx != 0 ? s.y : s.x;
    const int start = sx != 0 ? s.x * sx : s.y * sy;
    return std::make_tuple(sx, sy, line, start, fc.flow_id);
  };
  std::stable_sort(lanes.begin(), lanes.end(),
                   [&](const LaneRef& p, const LaneRef& q) { return lane_key(p) < lane_key(q); });

  for (const auto& ref : lanes) {
    auto& fc = plan.circuits[ref.circuit];
    auto& b = fc.branches[ref.branch];
    int placed = 0;
    for (int start = 0; start < h && placed < b.width; ++start) {
      const auto chain = lane_chain(mesh, ledger, b, start);
      if (chain.empty()) continue;
      for (int hop = 0; hop < b.hops(); ++hop) {
        ledger.claim(b.links[hop], chain[hop], fc.flow_id);
        b.units[hop].push_back(chain[hop]);
      }
      ++placed;
    }
    if (placed < b.width) {
      for (int hop = 0; hop < b.hops(); ++hop) {
        take_configurable(ledger, b, hop, b.width - placed, fc.flow_id, h, u);
      }
      plan.demotions += (b.width - placed) * std::max(0, b.hops() - 1);
    }
  }

  for (auto& fc : plan.circuits) {
    int offset = 0;
    for (auto& b : fc.branches) {
      build_crosspoints(mesh, b, offset);
      offset += b.width;
    }
  }
  return plan;
}

std::vector<std::string> audit_circuit_plan(const CircuitPlan& plan, const Platform& mesh) {
  std::vector<std::string> out;
  const int u = mesh.units(), h = mesh.hardwired_units();
  UnitLedger ledger(static_cast<int>(mesh.links().size()), u);
  for (const auto& fc : plan.circuits) {
    const int want_hops = manhattan_dist(mesh.coord(fc.source), mesh.coord(fc.sink));
    if (fc.units() < fc.requested_units) {
      out.push_back(fmt::format("flow {} carries {} units, needs {}", fc.flow_id, fc.units(),
                                fc.requested_units));
    }
    for (std::size_t bi = 0; bi < fc.branches.size(); ++bi) {
      const auto& b = fc.branches[bi];
      const auto where = fmt::format("flow {} branch {}", fc.flow_id, bi);
      if (b.width <= 0) out.push_back(where + ": empty width");
      if (b.hops() != want_hops) {
        out.push_back(fmt::format("{}: {} hops, endpoints are {} apart", where, b.hops(), want_hops));
      }
      if (b.nodes.size() != b.links.size() + 1 || b.nodes.front() != fc.source ||
          b.nodes.back() != fc.sink || b.units.size() != b.links.size()) {
        out.push_back(where + ": malformed path");
        continue;
      }
      for (int hop = 0; hop < b.hops(); ++hop) {
        if (mesh.link_between(b.nodes[hop], b.nodes[hop + 1]) != b.links[hop]) {
          out.push_back(fmt::format("{}: hop {} does not follow a link", where, hop));
        }
        if (static_cast<int>(b.units[hop].size()) != b.width) {
          out.push_back(fmt::format("{}: hop {} has {} units for width {}", where, hop,
                                    b.units[hop].size(), b.width));
        }
        for (int unit : b.units[hop]) {
          if (unit < 0 || unit >= u) {
            out.push_back(fmt::format("{}: unit {} out of range", where, unit));
          } else if (!ledger.is_free(b.links[hop], unit)) {
            out.push_back(fmt::format("unit {} of link {} shared by flows {} and {}", unit,
                                      b.links[hop], ledger.owner(b.links[hop], unit), fc.flow_id));
          } else {
            ledger.claim(b.links[hop], unit, fc.flow_id);
          }
        }
      }
      if (b.crosspoints.size() != static_cast<std::size_t>((b.hops() + 1) * b.width)) {
        out.push_back(where + ": crosspoint count mismatch");
        continue;
      }
      for (const auto& x : b.crosspoints) {
        if (x.kind == CrosspointKind::Hardwired && !mesh.pattern().matches(x.node, x.in, x.out)) {
          out.push_back(fmt::format("{}: hardwired crosspoint at node {} not in the pattern", where, x.node));
        }
        const bool fixed_wire = (x.in.port != Port::Local && x.in.unit < h) ||
                                (x.out.port != Port::Local && x.out.unit < h);
        const bool tap = x.in.port == Port::Local || x.out.port == Port::Local;
        if (fixed_wire && !tap && x.kind != CrosspointKind::Hardwired) {
          out.push_back(fmt::format("{}: configurable crosspoint on a hardwired unit at node {}", where, x.node));
        }
      }
    }
  }
  return out;
}

namespace {

nlohmann::json unit_ref_json(const UnitRef& r) {
  return nlohmann::json::array({std::string(port_name(r.port)), r.unit});
}

UnitRef unit_ref_from(const nlohmann::json& j) {
  return {parse_port(j.at(0).get<std::string>()), j.at(1).get<int>()};
}

}  // namespace

std::string render_circuit_plan(const CircuitPlan& plan, const Platform& mesh) {
  using nlohmann::json;
  json circuits = json::array();
  for (const auto& fc : plan.circuits) {
    json branches = json::array();
    for (const auto& b : fc.branches) {
      json nodes = json::array();
      for (int n : b.nodes) {
        const auto c = mesh.coord(n);
        nodes.push_back({c.x, c.y});
      }
      json xps = json::array();
      for (const auto& x : b.crosspoints) {
        xps.push_back({{"node", x.node},
                       {"in", unit_ref_json(x.in)},
                       {"out", unit_ref_json(x.out)},
                       {"kind", x.kind == CrosspointKind::Hardwired ? "hardwired" : "configurable"}});
      }
      branches.push_back({{"nodes", nodes},
                          {"width", b.width},
                          {"hardwired_lane", b.hardwired_lane},
                          {"units", b.units},
                          {"crosspoints", xps}});
    }
    circuits.push_back({{"flow", fc.flow_id},
                        {"source", fc.source},
                        {"sink", fc.sink},
                        {"requested_units", fc.requested_units},
                        {"branches", branches}});
  }
  json doc{{"unit_width", plan.unit_width},
           {"units_per_link", plan.units_per_link},
           {"hardwired_units", plan.hardwired_units},
           {"demotions", plan.demotions},
           {"circuits", circuits}};
  return doc.dump(1) + "\n";
}

CircuitPlan parse_circuit_plan(std::string_view text, const Platform& mesh) {
  try {
    const auto doc = nlohmann::json::parse(text);
    CircuitPlan plan;
    plan.unit_width = doc.at("unit_width").get<int>();
    plan.units_per_link = doc.at("units_per_link").get<int>();
    plan.hardwired_units = doc.at("hardwired_units").get<int>();
    plan.demotions = doc.at("demotions").get<int>();
    for (const auto& jc : doc.at("circuits")) {
      FlowCircuit fc;
      fc.flow_id = jc.at("flow").get<int>();
      fc.source = jc.at("source").get<int>();
      fc.sink = jc.at("sink").get<int>();
      fc.requested_units = jc.at("requested_units").get<int>();
      for (const auto& jb : jc.at("branches")) {
        Branch b;
        for (const auto& xy : jb.at("nodes")) {
          const Coord c{xy.at(0).get<int>(), xy.at(1).get<int>()};
          if (!mesh.contains(c)) throw std::invalid_argument("branch node outside the mesh");
          b.nodes.push_back(mesh.node(c));
        }
        b.links = path_links(mesh, b.nodes);
        b.width = jb.at("width").get<int>();
        b.hardwired_lane = jb.at("hardwired_lane").get<bool>();
        b.units = jb.at("units").get<std::vector<std::vector<int>>>();
        for (const auto& jx : jb.at("crosspoints")) {
          Crosspoint x;
          x.node = jx.at("node").get<int>();
          x.in = unit_ref_from(jx.at("in"));
          x.out = unit_ref_from(jx.at("out"));
          x.kind = jx.at("kind").get<std::string>() == "hardwired" ? CrosspointKind::Hardwired
                                                                   : CrosspointKind::Configurable;
          b.crosspoints.push_back(x);
        }
        fc.branches.push_back(std::move(b));
      }
      plan.circuits.push_back(std::move(fc));
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(fmt::format("bad circuit plan: {}", e.what()));
  }
}

}  // namespace sdmnoc
