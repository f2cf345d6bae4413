#include "sdmnoc/metrics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

namespace sdmnoc {

namespace {

using nlohmann::json;

template <typename F>
void each_energy(EnergyCoefficients& e, F&& f) {
  f("buffer_write", e.buffer_write);
  f("buffer_read", e.buffer_read);
  f("crosspoint_configurable", e.crosspoint_configurable);
  f("crosspoint_hardwired", e.crosspoint_hardwired);
  f("link_per_bit_per_hop", e.link_per_bit_per_hop);
  f("arbiter_decision", e.arbiter_decision);
  f("route_compute", e.route_compute);
}

template <typename F>
void each_leakage(LeakageCoefficients& l, F&& f) {
  f("buffer_per_flit_slot", l.buffer_per_flit_slot);
  f("crosspoint_configurable", l.crosspoint_configurable);
  f("crosspoint_hardwired", l.crosspoint_hardwired);
  f("link_per_bit", l.link_per_bit);
}

template <typename F>
void each_area(AreaCoefficients& a, F&& f) {
  f("buffer_per_flit_slot", a.buffer_per_flit_slot);
  f("crosspoint_configurable", a.crosspoint_configurable);
  f("crosspoint_hardwired", a.crosspoint_hardwired);
  f("link_per_bit", a.link_per_bit);
  f("arbiter", a.arbiter);
  f("route_compute", a.route_compute);
}

double ratio(double a, double b) {
  if (b == 0.0) return a == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return a / b;
}

}  // namespace

std::vector<std::string> validate_cost_model(const CostModel& cm) {
  std::vector<std::string> errs;
  CostModel c = cm;
  auto check = [&](std::string_view group) {
    return [&errs, group](std::string_view name, double v) {
      if (!std::isfinite(v) || v < 0.0) errs.push_back(fmt::format("{}.{} must be >= 0", group, name));
    };
  };
  each_energy(c.energy, check("energy"));
  each_leakage(c.leakage, check("leakage"));
  each_area(c.area, check("area"));
  if (!(c.energy.crosspoint_hardwired < c.energy.crosspoint_configurable)) {
    errs.push_back("energy.crosspoint_hardwired must be below energy.crosspoint_configurable");
  }
  if (!(c.leakage.crosspoint_hardwired < c.leakage.crosspoint_configurable)) {
    errs.push_back("leakage.crosspoint_hardwired must be below leakage.crosspoint_configurable");
  }
  if (!(c.area.crosspoint_hardwired < c.area.crosspoint_configurable)) {
    errs.push_back("area.crosspoint_hardwired must be below area.crosspoint_configurable");
  }
  return errs;
}

CostModel parse_cost_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CostModelError(fmt::format("cost model: {}", e.what()));
  }
  CostModel cm;
  auto read = [&doc](std::string_view group) {
    return [&doc, group](std::string_view name, double& v) {
      const std::string g(group), n(name);
      if (!doc.is_object() || !doc.contains(g) || !doc[g].contains(n) || !doc[g][n].is_number()) {
        throw CostModelError(fmt::format("cost model: missing {}.{}", g, n));
      }
      v = doc[g][n].get<double>();
    };
  };
  each_energy(cm.energy, read("energy"));
  each_leakage(cm.leakage, read("leakage"));
  each_area(cm.area, read("area"));
  const auto errs = validate_cost_model(cm);
  if (!errs.empty()) throw CostModelError(fmt::format("cost model: {}", errs.front()));
  return cm;
}

std::string render_cost_model(const CostModel& cm) {
  CostModel c = cm;
  json doc;
  auto put = [&doc](std::string_view group) {
    return [&doc, group](std::string_view name, double v) { doc[std::string(group)][std::string(name)] = v; };
  };
  each_energy(c.energy, put("energy"));
  each_leakage(c.leakage, put("leakage"));
  each_area(c.area, put("area"));
  return doc.dump(2) + "\n";
}

CostModel default_cost_model() {
  CostModel cm;
  cm.energy = {1.0e-12, 1.0e-12, 0.30e-12, 0.10e-12, 0.05e-12, 0.20e-12, 0.20e-12};
  cm.leakage = {1.0e-5, 1.5e-8, 0.5e-8, 0.5e-8};
  cm.area = {1.0, 0.0015, 0.0005, 0.0005, 0.5, 0.5};
  return cm;
}

std::string default_cost_model_path() { return std::string(SDMNOC_CONFIG_DIR) + "/default_cost_model.json"; }

ComponentCounts count_components(const Platform& mesh, const DesignDescriptor& d) {
  ComponentCounts c;
  const auto u = static_cast<std::uint64_t>(mesh.units());
  const auto conf = static_cast<std::uint64_t>(mesh.config().configurable_units());
  c.link_bits = mesh.links().size() * static_cast<std::uint64_t>(mesh.config().link_width);
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    std::uint64_t mesh_ports = 0;
    for (Port p : kMeshPorts) mesh_ports += mesh.has_port(n, p) ? 1 : 0;
    if (d.kind == DesignKind::Sdm) {
      c.pipeline_registers += mesh_ports;
      c.crosspoints_configurable += mesh_ports * (mesh_ports - 1) * conf * conf;
      c.crosspoints_configurable += 2 * mesh_ports * u * u;  // injection and ejection
    } else {
      const std::uint64_t ports = mesh_ports + 1;
      c.buffer_slots += ports * static_cast<std::uint64_t>(d.buffer_depth);
      c.crosspoints_configurable += ports * (ports - 1) * u;
      c.arbiters += ports;
      c.route_units += ports;
    }
  }
  if (d.kind == DesignKind::Sdm) c.crosspoints_hardwired = mesh.pattern().size();
  return c;
}

double breakdown_sum(const Breakdown& b) {
  double s = 0.0;
  for (const auto& [k, v] : b) s += v;
  return s;
}

PowerReport estimate_power(const SimResult& r, const Platform& mesh, const DesignDescriptor& d,
                           const CostModel& cm, std::int64_t sim_cycles, std::uint64_t frequency_hz) {
  const auto errs = validate_cost_model(cm);
  if (!errs.empty()) throw CostModelError(errs.front());
  if (sim_cycles <= 0) throw std::invalid_argument("simulated cycles must be positive");
  const bool sdm = d.kind == DesignKind::Sdm;
  const auto ev = r.total_events();
  const auto& e = cm.energy;
  const double scale = static_cast<double>(frequency_hz) / static_cast<double>(sim_cycles);
  auto w = [scale](double joules) { return joules * scale; };

  const double storage = static_cast<double>(ev.buffer_writes) * e.buffer_write +
                         static_cast<double>(ev.buffer_reads) * e.buffer_read;
  PowerReport p;
  p.design = sdm ? "sdm" : "wormhole";
  p.dynamic_breakdown = {
      {"buffer", sdm ? 0.0 : w(storage)},
      {"pipeline_register", sdm ? w(storage) : 0.0},
      {"crosspoint_configurable", w(static_cast<double>(ev.crosspoint_configurable) * e.crosspoint_configurable)},
      {"crosspoint_hardwired", w(static_cast<double>(ev.crosspoint_hardwired) * e.crosspoint_hardwired)},
      {"link", w(static_cast<double>(r.link_bit_hops) * e.link_per_bit_per_hop)},
      {"arbiter", w(static_cast<double>(ev.arbitrations) * e.arbiter_decision)},
      {"route_compute", w(static_cast<double>(ev.route_computes) * e.route_compute)},
  };
  const auto c = count_components(mesh, d);
  const auto& l = cm.leakage;
  p.leakage_breakdown = {
      {"buffer", static_cast<double>(c.buffer_slots) * l.buffer_per_flit_slot},
      {"pipeline_register", static_cast<double>(c.pipeline_registers) * l.buffer_per_flit_slot},
      {"crosspoint_configurable", static_cast<double>(c.crosspoints_configurable) * l.crosspoint_configurable},
      {"crosspoint_hardwired", static_cast<double>(c.crosspoints_hardwired) * l.crosspoint_hardwired},
      {"link", static_cast<double>(c.link_bits) * l.link_per_bit},
      {"arbiter", 0.0},
      {"route_compute", 0.0},
  };
  p.dynamic_w = breakdown_sum(p.dynamic_breakdown);
  p.leakage_w = breakdown_sum(p.leakage_breakdown);
  p.total_w = p.dynamic_w + p.leakage_w;
  return p;
}

AreaReport estimate_area(const Platform& mesh, const DesignDescriptor& d, const CostModel& cm) {
  const auto c = count_components(mesh, d);
  const auto& a = cm.area;
  AreaReport r;
  r.design = d.kind == DesignKind::Sdm ? "sdm" : "wormhole";
  r.breakdown = {
      {"buffer", static_cast<double>(c.buffer_slots) * a.buffer_per_flit_slot},
      {"pipeline_register", static_cast<double>(c.pipeline_registers) * a.buffer_per_flit_slot},
      {"crosspoint_configurable", static_cast<double>(c.crosspoints_configurable) * a.crosspoint_configurable},
      {"crosspoint_hardwired", static_cast<double>(c.crosspoints_hardwired) * a.crosspoint_hardwired},
      {"link", static_cast<double>(c.link_bits) * a.link_per_bit},
      {"arbiter", static_cast<double>(c.arbiters) * a.arbiter},
      {"route_compute", static_cast<double>(c.route_units) * a.route_compute},
  };
  r.total = breakdown_sum(r.breakdown);
  return r;
}

Comparison compare(const SimResult& sdm, const PowerReport& sdm_power, const AreaReport& sdm_area,
                   const SimResult& base, const PowerReport& base_power, const AreaReport& base_area) {
  Comparison c;
  c.latency = ratio(sdm.mean_latency(), base.mean_latency());
  c.dynamic_power = ratio(sdm_power.dynamic_w, base_power.dynamic_w);
  c.leakage_power = ratio(sdm_power.leakage_w, base_power.leakage_w);
  c.total_power = ratio(sdm_power.total_w, base_power.total_w);
  c.area = ratio(sdm_area.total, base_area.total);
  return c;
}

std::string render_compare_csv(const Comparison& ratios, const SimResult& sdm,
                               const PowerReport& sdm_power, const AreaReport& sdm_area,
                               const SimResult& base, const PowerReport& base_power,
                               const AreaReport& base_area) {
  std::string out = "metric,sdm,baseline,ratio\n";
  auto row = [&out](std::string_view name, double a, double b, double r) {
    out += fmt::format("{},{:.9g},{:.9g},{:.6f}\n", name, a, b, r);
  };
  row("latency", sdm.mean_latency(), base.mean_latency(), ratios.latency);
  row("dynamic_power", sdm_power.dynamic_w, base_power.dynamic_w, ratios.dynamic_power);
  row("leakage_power", sdm_power.leakage_w, base_power.leakage_w, ratios.leakage_power);
  row("total_power", sdm_power.total_w, base_power.total_w, ratios.total_power);
  row("area", sdm_area.total, base_area.total, ratios.area);
  return out;
}

std::string render_power_csv(const std::vector<std::pair<PowerReport, AreaReport>>& designs) {
  std::string out = "design,component,dynamic_w,leakage_w,area\n";
  for (const auto& [p, a] : designs) {
    for (std::size_t i = 0; i < p.dynamic_breakdown.size(); ++i) {
      out += fmt::format("{},{},{:.9g},{:.9g},{:.9g}\n", p.design, p.dynamic_breakdown[i].first,
                         p.dynamic_breakdown[i].second, p.leakage_breakdown[i].second, a.breakdown[i].second);
    }
    out += fmt::format("{},total,{:.9g},{:.9g},{:.9g}\n", p.design, p.dynamic_w, p.leakage_w, a.total);
  }
  return out;
}

std::string render_power_json(const PowerReport& p, const AreaReport& a) {
  json dyn = json::object(), leak = json::object(), area = json::object();
  for (const auto& [k, v] : p.dynamic_breakdown) dyn[k] = v;
  for (const auto& [k, v] : p.leakage_breakdown) leak[k] = v;
  for (const auto& [k, v] : a.breakdown) area[k] = v;
  json doc{{"design", p.design},
           {"dynamic_w", p.dynamic_w},
           {"leakage_w", p.leakage_w},
           {"total_w", p.total_w},
           {"dynamic", dyn},
           {"leakage", leak},
           {"area_total", a.total},
           {"area", area}};
  return doc.dump(2) + "\n";
}

}  // namespace sdmnoc
