#include "sdmnoc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "sdmnoc/hashing.hpp"

namespace sdmnoc {

namespace {

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
}

std::string what_of_current() {
  try {
    throw;
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown error";
  }
}

}  // namespace

ExitCode classify_current_exception() {
  try {
    throw;
  } catch (const ConfigError&) {
    return ExitCode::Config;
  } catch (const CtgError&) {
    return ExitCode::Config;
  } catch (const nlohmann::json::exception&) {
    return ExitCode::Config;
  } catch (const MappingError&) {
    return ExitCode::MappingInfeasible;
  } catch (const RoutingInfeasible&) {
    return ExitCode::RoutingInfeasible;
  } catch (const NoFeasibleFrequency&) {
    return ExitCode::RoutingInfeasible;
  } catch (const std::invalid_argument&) {
    return ExitCode::Config;
  } catch (...) {
    return ExitCode::SimFailure;
  }
}

std::string_view mapping_name(MappingChoice m) {
  switch (m) {
    case MappingChoice::Heuristic: return "heuristic";
    case MappingChoice::Random: return "random";
    case MappingChoice::Exhaustive: return "exhaustive";
  }
  return "?";
}

MappingChoice parse_mapping(std::string_view name) {
  if (name == "heuristic") return MappingChoice::Heuristic;
  if (name == "random") return MappingChoice::Random;
  if (name == "exhaustive") return MappingChoice::Exhaustive;
  throw ConfigError(fmt::format("unknown mapping '{}'", name));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string default_platform_path() { return std::string(SDMNOC_CONFIG_DIR) + "/default_platform.json"; }

std::int64_t peak_xy_channel_load(const TaskGraph& g, const Platform& mesh, const Mapping& p) {
  std::vector<std::int64_t> link(mesh.links().size(), 0);
  std::vector<std::int64_t> inject(mesh.num_nodes(), 0), eject(mesh.num_nodes(), 0);
  for (const auto& f : g.flows) {
    int at = p.node_of_task.at(f.src);
    const int dst = p.node_of_task.at(f.dst);
    inject[at] += f.demand_bps;
    eject[dst] += f.demand_bps;
    const Coord b = mesh.coord(dst);
    while (at != dst) {
      const Coord a = mesh.coord(at);
      Coord next = a;
      if (a.x != b.x) {
        next.x += b.x > a.x ? 1 : -1;
      } else {
        next.y += b.y > a.y ? 1 : -1;
      }
      const int n = mesh.node(next);
      link[mesh.link_between(at, n)] += f.demand_bps;
      at = n;
    }
  }
  std::int64_t peak = 0;
  for (auto v : link) peak = std::max(peak, v);
  for (auto v : inject) peak = std::max(peak, v);
  for (auto v : eject) peak = std::max(peak, v);
  return peak;
}

std::uint64_t load_frequency(const TaskGraph& g, const Platform& mesh, const Mapping& p,
                             double utilization) {
  if (!(utilization > 0.0) || utilization > 1.0) throw ConfigError("utilization must be in (0, 1]");
  const double peak = static_cast<double>(peak_xy_channel_load(g, mesh, p));
  const double f = std::ceil(peak / (utilization * mesh.config().link_width));
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(f));
}

Mapping choose_mapping(const TaskGraph& g, const Platform& mesh, MappingChoice m, std::uint64_t seed) {
  switch (m) {
    case MappingChoice::Heuristic: return map_tasks_heuristic(g, mesh, seed);
    case MappingChoice::Random: return map_tasks_random(g, mesh, seed);
    case MappingChoice::Exhaustive: return map_tasks_exhaustive(g, mesh);
  }
  throw std::logic_error("unreachable mapping choice");
}

FlowRun run_flow(const TaskGraph& g, const ExperimentConfig& cfg, const FlowOptions& opts) {
  if (const auto errs = validate_ctg(g); !errs.empty()) throw ConfigError(fmt::format("ctg: {}", errs.front()));
  if (cfg.horizon <= 0) throw ConfigError("horizon must be positive");
  FlowRun run;
  run.graph = g;
  run.spec = cfg.platform;
  const Platform base_mesh(run.spec.config, run.spec.pattern);
  run.mapping = opts.mapping ? *opts.mapping : choose_mapping(g, base_mesh, cfg.mapping, cfg.seed);
  if (!is_valid_mapping(g, base_mesh, run.mapping)) throw MappingError("mapping is not a valid placement");

  RouteOptions ro;
  ro.solver = cfg.solver;
  ro.widen = cfg.widen;
  ro.packet_bits = cfg.packet_bits;
  if (opts.frequency) {
    run.spec.config.frequency_hz = *opts.frequency;
    const Platform mesh(run.spec.config, run.spec.pattern);
    auto d = route_design(g, mesh, run.mapping, ro);
    if (!d) {
      throw RoutingInfeasible(fmt::format("{} cannot route all flows at {} Hz", solver_name(cfg.solver),
                                          *opts.frequency));
    }
    run.design = std::move(*d);
  } else {
    FrequencyGrid grid;
    grid.f0 = load_frequency(g, base_mesh, run.mapping, cfg.utilization);
    try {
      auto fr = find_min_feasible_frequency(g, run.spec, run.mapping, ro, grid);
      run.spec.config.frequency_hz = fr.frequency_hz;
      run.design = std::move(fr.design);
    } catch (const NoFeasibleFrequency& e) {
      throw RoutingInfeasible(e.what());
    }
  }

  const Platform mesh(run.spec.config, run.spec.pattern);
  if (const auto errs = audit_circuit_plan(run.design.plan, mesh); !errs.empty()) {
    throw SimError(fmt::format("circuit plan audit: {}", errs.front()));
  }
  WorkloadOptions wo;
  wo.packet_bits = cfg.packet_bits;
  run.workload = generate_workload(g, run.spec.config, cfg.horizon, cfg.seed, wo);
  run.sdm = simulate_sdm(mesh, run.design.plan, run.workload, cfg.horizon);
  const DesignDescriptor sdm_d{DesignKind::Sdm, cfg.wormhole.buffer_depth};
  const DesignDescriptor base_d{DesignKind::Wormhole, cfg.wormhole.buffer_depth};
  const auto f = run.frequency_hz();
  run.sdm_power = estimate_power(run.sdm, mesh, sdm_d, cfg.cost_model, cfg.horizon, f);
  run.sdm_area = estimate_area(mesh, sdm_d, cfg.cost_model);
  if (opts.simulate_baseline) {
    run.base = simulate_wormhole(mesh, run.mapping, g, run.workload, cfg.horizon, cfg.wormhole);
    run.base_power = estimate_power(run.base, mesh, base_d, cfg.cost_model, cfg.horizon, f);
    run.base_area = estimate_area(mesh, base_d, cfg.cost_model);
    run.ratios = compare(run.sdm, run.sdm_power, run.sdm_area, run.base, run.base_power, run.base_area);
  }
  return run;
}

std::string provenance_line(const std::vector<TaskGraph>& graphs, const PlatformSpec& spec,
                            const CostModel& cm) {
  std::string ctg;
  for (const auto& g : graphs) ctg += render_ctg(g);
  return fmt::format("# ctg={} platform={} cost_model={}\n", sha256_hex(ctg),
                     sha256_hex(render_platform_config(spec)), sha256_hex(render_cost_model(cm)));
}

void write_flow_artifacts(const FlowRun& run, const ExperimentConfig& cfg,
                          const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  const Platform mesh(run.spec.config, run.spec.pattern);
  const auto prov = provenance_line({run.graph}, cfg.platform, cfg.cost_model);
  write_file(dir / "mapping.json", render_mapping(run.graph, mesh, run.mapping));
  write_file(dir / "circuits.json", render_circuit_plan(run.design.plan, mesh));
  write_file(dir / "sim_sdm.csv", prov + render_flow_csv(run.sdm));
  write_file(dir / "sim_base.csv", prov + render_flow_csv(run.base));
  write_file(dir / "power.csv",
             prov + render_power_csv({{run.sdm_power, run.sdm_area}, {run.base_power, run.base_area}}));
  write_file(dir / "compare.csv", prov + render_compare_csv(run.ratios, run.sdm, run.sdm_power, run.sdm_area,
                                                            run.base, run.base_power, run.base_area));
}

PresetCase preset_case(const BenchmarkPreset& preset, const PlatformSpec& base, std::uint64_t seed) {
  if (base.pattern) throw ConfigError("an explicit hardwired table cannot be resized to a preset mesh");
  PresetCase c;
  c.graph = preset_ctg(preset, kPresetDemandLo, kPresetDemandHi, seed);
  c.spec = base;
  c.spec.config.rows = preset.rows;
  c.spec.config.cols = preset.cols;
  return c;
}

std::vector<SweepPoint> sweep_hardwired(const std::vector<PresetCase>& cases,
                                        const std::vector<int>& l_values, const ExperimentConfig& cfg) {
  struct Reference {
    bool ok = false;
    std::string note;
    Mapping mapping;
    std::uint64_t frequency = 0;
    double power = 0.0;
  };
  std::vector<Reference> refs(cases.size());
  parallel_for(cases.size(), cfg.threads, [&](std::size_t i) {
    ExperimentConfig c = cfg;
    c.platform = cases[i].spec;
    c.platform.config.hardwired_per_port = 0;
    FlowOptions fo;
    fo.simulate_baseline = false;
    try {
      const auto run = run_flow(cases[i].graph, c, fo);
      refs[i] = {true, "", run.mapping, run.frequency_hz(), run.sdm_power.total_w};
    } catch (...) {
      refs[i].note = what_of_current();
    }
  });

  std::vector<SweepPoint> points(cases.size() * l_values.size());
  parallel_for(points.size(), cfg.threads, [&](std::size_t j) {
    const std::size_t i = j / l_values.size();
    auto& pt = points[j];
    pt.benchmark = cases[i].graph.name;
    pt.hardwired_bits = l_values[j % l_values.size()];
    const auto& ref = refs[i];
    if (!ref.ok) {
      pt.note = "reference run failed: " + ref.note;
      return;
    }
    pt.frequency_hz = ref.frequency;
    ExperimentConfig c = cfg;
    c.platform = cases[i].spec;
    c.platform.config.hardwired_per_port = pt.hardwired_bits;
    FlowOptions fo;
    fo.simulate_baseline = false;
    fo.mapping = ref.mapping;
    fo.frequency = ref.frequency;
    try {
      const auto run = run_flow(cases[i].graph, c, fo);
      pt.feasible = true;
      pt.total_power_w = run.sdm_power.total_w;
      pt.ratio = run.sdm_power.total_w / ref.power;
    } catch (...) {
      pt.note = what_of_current();
    }
  });
  return points;
}

std::string render_sweep_csv(const std::vector<SweepPoint>& points, const std::string& provenance) {
  std::string out = provenance + "benchmark,hardwired_bits,feasible,frequency_hz,total_power_w,ratio,note\n";
  for (const auto& p : points) {
    out += fmt::format("{},{},{},{},{:.9g},{:.6f},{}\n", p.benchmark, p.hardwired_bits, p.feasible ? 1 : 0,
                       p.frequency_hz, p.total_power_w, p.ratio, csv_safe(p.note));
  }
  return out;
}

std::optional<double> FrequencyPoint::ratio() const {
  if (!mcnf_hz || !greedy_hz) return std::nullopt;
  return static_cast<double>(*mcnf_hz) / static_cast<double>(*greedy_hz);
}

std::vector<FrequencyPoint> min_frequency_study(const std::vector<PresetCase>& cases,
                                                const ExperimentConfig& cfg) {
  std::vector<FrequencyPoint> points(cases.size());
  parallel_for(cases.size() * 2, cfg.threads, [&](std::size_t j) {
    const std::size_t i = j / 2;
    const bool greedy = j % 2 == 1;
    const auto& c = cases[i];
    const Platform mesh(c.spec.config, c.spec.pattern);
    Mapping p;
    try {
      p = choose_mapping(c.graph, mesh, cfg.mapping, cfg.seed);
    } catch (...) {
      if (!greedy) points[i].note = what_of_current();
      return;
    }
    RouteOptions ro;
    ro.solver = greedy ? SolverChoice::Greedy : cfg.solver;
    ro.packet_bits = cfg.packet_bits;
    FrequencyGrid grid;
    grid.f0 = frequency_floor(c.graph, c.spec.config);
    try {
      const auto fr = find_min_feasible_frequency(c.graph, c.spec, p, ro, grid);
      (greedy ? points[i].greedy_hz : points[i].mcnf_hz) = fr.frequency_hz;
    } catch (...) {
      if (!greedy) points[i].note = what_of_current();
    }
  });
  for (std::size_t i = 0; i < cases.size(); ++i) points[i].benchmark = cases[i].graph.name;
  return points;
}

std::string render_frequency_csv(const std::vector<FrequencyPoint>& points, const std::string& provenance) {
  std::string out = provenance + "benchmark,mcnf_hz,greedy_hz,ratio,note\n";
  for (const auto& p : points) {
    const auto r = p.ratio();
    out += fmt::format("{},{},{},{},{}\n", p.benchmark, p.mcnf_hz ? fmt::to_string(*p.mcnf_hz) : "",
                       p.greedy_hz ? fmt::to_string(*p.greedy_hz) : "",
                       r ? fmt::format("{:.6f}", *r) : "", csv_safe(p.note));
  }
  return out;
}

std::vector<MappingPoint> mapping_study(const BenchmarkPreset& preset, const std::vector<std::uint64_t>& seeds,
                                        int k_random, const ExperimentConfig& cfg) {
  if (k_random < 0) throw ConfigError("K must be non-negative");
  const std::size_t per_seed = static_cast<std::size_t>(k_random) + 1;
  std::vector<MappingPoint> points(seeds.size() * per_seed);
  parallel_for(points.size(), cfg.threads, [&](std::size_t j) {
    const std::uint64_t seed = seeds[j / per_seed];
    const int idx = static_cast<int>(j % per_seed);
    auto& pt = points[j];
    pt.seed = seed;
    pt.mode = idx == 0 ? "heuristic" : "random";
    pt.index = idx == 0 ? 0 : idx - 1;
    try {
      const auto c = preset_case(preset, cfg.platform, seed);
      const Platform mesh(c.spec.config, c.spec.pattern);
      FlowOptions fo;
      fo.mapping = idx == 0 ? map_tasks_heuristic(c.graph, mesh, seed)
                            : map_tasks_random(c.graph, mesh, seed * 1000003ULL + static_cast<std::uint64_t>(idx));
      ExperimentConfig ec = cfg;
      ec.platform = c.spec;
      ec.seed = seed;
      const auto run = run_flow(c.graph, ec, fo);
      pt.ok = true;
      pt.latency_ratio = run.ratios.latency;
      pt.power_ratio = run.ratios.total_power;
    } catch (...) {
      pt.note = what_of_current();
    }
  });
  return points;
}

std::string render_mapping_study_csv(const std::vector<MappingPoint>& points, const std::string& provenance) {
  std::string out = provenance +
                    "seed,mode,index,ok,latency_ratio,power_ratio,latency_improvement,power_improvement,note\n";
  for (const auto& p : points) {
    out += fmt::format("{},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{}\n", p.seed, p.mode, p.index, p.ok ? 1 : 0,
                       p.latency_ratio, p.power_ratio, p.ok ? p.latency_improvement() : 0.0,
                       p.ok ? p.power_improvement() : 0.0, csv_safe(p.note));
  }
  return out;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t t = threads > 0 ? static_cast<std::size_t>(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  t = std::min(t, n);
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr first;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 1; k < t; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace sdmnoc
