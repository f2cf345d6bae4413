#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sdmnoc/experiments.hpp"

using namespace sdmnoc;

namespace {

struct Args {
  std::string ctg;
  std::string platform = default_platform_path();
  std::string cost_model = default_cost_model_path();
  std::string solver = "heuristic";
  std::string mapping = "heuristic";
  std::uint64_t seed = 1;
  std::int64_t horizon = 20'000;
  std::string out = "out";
  std::string preset;
  double utilization = 0.5;
  int threads = 0;
  std::string l_values = "0,16,32,48,64,80,96,112,128";
  int k_random = 10;
  int seeds = 10;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--ctg", a.ctg, "CTG JSON file");
  cmd->add_option("--platform", a.platform, "platform JSON file");
  cmd->add_option("--cost-model", a.cost_model, "cost model JSON file");
  cmd->add_option("--solver", a.solver, "exact | heuristic | greedy");
  cmd->add_option("--mapping", a.mapping, "heuristic | random | exhaustive");
  cmd->add_option("--seed", a.seed, "seed");
  cmd->add_option("--horizon", a.horizon, "injection horizon in cycles");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--utilization", a.utilization, "peak XY channel load over capacity at the operating point");
  cmd->add_option("--threads", a.threads, "worker threads, 0 for all cores");
}

ExperimentConfig load_config(const Args& a) {
  ExperimentConfig cfg;
  cfg.platform = parse_platform_config(read_text_file(a.platform));
  cfg.cost_model = parse_cost_model(read_text_file(a.cost_model));
  try {
    cfg.solver = parse_solver(a.solver);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.mapping = parse_mapping(a.mapping);
  cfg.seed = a.seed;
  cfg.horizon = a.horizon;
  cfg.utilization = a.utilization;
  cfg.threads = a.threads;
  return cfg;
}

std::vector<PresetCase> load_cases(const Args& a, const ExperimentConfig& cfg, std::string_view fallback) {
  std::vector<PresetCase> cases;
  if (!a.ctg.empty()) {
    PresetCase c;
    c.graph = parse_ctg(read_text_file(a.ctg));
    if (c.graph.name.empty()) c.graph.name = std::filesystem::path(a.ctg).stem().string();
    c.spec = cfg.platform;
    cases.push_back(std::move(c));
    return cases;
  }
  const std::string key = a.preset.empty() ? std::string(fallback) : a.preset;
  if (key.empty()) throw ConfigError("give --ctg or --preset");
  if (key == "all") {
    for (const auto& p : benchmark_presets()) cases.push_back(preset_case(p, cfg.platform, a.seed));
  } else {
    try {
      cases.push_back(preset_case(find_preset(key), cfg.platform, a.seed));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return cases;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad integer '{}' in list", item));
    }
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

std::filesystem::path prepare_out(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create {}", dir));
  return dir;
}

void write_out(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
}

int cmd_flow(const Args& a) {
  const auto cfg0 = load_config(a);
  auto cases = load_cases(a, cfg0, "");
  auto cfg = cfg0;
  cfg.platform = cases.front().spec;
  const auto run = run_flow(cases.front().graph, cfg);
  for (const auto& w : run.workload.warnings) fmt::print(stderr, "warning: {}\n", w);
  write_flow_artifacts(run, cfg, a.out);
  fmt::print("frequency_hz {}\n", run.frequency_hz());
  fmt::print("latency sdm {:.3f} wormhole {:.3f} ratio {:.4f}\n", run.sdm.mean_latency(),
             run.base.mean_latency(), run.ratios.latency);
  fmt::print("power sdm {:.6g} W wormhole {:.6g} W ratio {:.4f}\n", run.sdm_power.total_w,
             run.base_power.total_w, run.ratios.total_power);
  fmt::print("area ratio {:.4f}\n", run.ratios.area);
  if (run.base.saturated) fmt::print(stderr, "warning: wormhole run did not drain\n");
  return 0;
}

int cmd_sweep(const Args& a) {
  const auto cfg = load_config(a);
  const auto cases = load_cases(a, cfg, "all");
  const auto points = sweep_hardwired(cases, parse_int_list(a.l_values), cfg);
  std::vector<TaskGraph> graphs;
  for (const auto& c : cases) graphs.push_back(c.graph);
  const auto csv = render_sweep_csv(points, provenance_line(graphs, cfg.platform, cfg.cost_model));
  write_out(prepare_out(a.out) / "sweep_hardwired.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_min_frequency(const Args& a) {
  const auto cfg = load_config(a);
  const auto cases = load_cases(a, cfg, "all");
  const auto points = min_frequency_study(cases, cfg);
  std::vector<TaskGraph> graphs;
  for (const auto& c : cases) graphs.push_back(c.graph);
  const auto csv = render_frequency_csv(points, provenance_line(graphs, cfg.platform, cfg.cost_model));
  write_out(prepare_out(a.out) / "min_frequency.csv", csv);
  std::cout << csv;
  return 0;
}

int cmd_mapping_study(const Args& a) {
  const auto cfg = load_config(a);
  const std::string key = a.preset.empty() ? "mms" : a.preset;
  const BenchmarkPreset* preset = nullptr;
  try {
    preset = &find_preset(key);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (a.seeds <= 0) throw ConfigError("--seeds must be positive");
  std::vector<std::uint64_t> seeds;
  std::vector<TaskGraph> graphs;
  for (int s = 0; s < a.seeds; ++s) {
    seeds.push_back(a.seed + static_cast<std::uint64_t>(s));
    graphs.push_back(preset_case(*preset, cfg.platform, seeds.back()).graph);
  }
  const auto points = mapping_study(*preset, seeds, a.k_random, cfg);
  const auto csv = render_mapping_study_csv(points, provenance_line(graphs, cfg.platform, cfg.cost_model));
  write_out(prepare_out(a.out) / "mapping_study.csv", csv);
  std::cout << csv;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDM circuit-switched NoC design flow"};
  app.require_subcommand(1);
  Args a;

  auto* flow = app.add_subcommand("flow", "map, route, simulate and compare one application");
  add_common(flow, a);
  flow->add_option("--preset", a.preset, "mwd | vopd | mms | gsm-dec | gsm-enc | robot | telecom | auto");

  auto* sweep = app.add_subcommand("sweep-hardwired", "power against hardwired bits per port");
  add_common(sweep, a);
  sweep->add_option("--preset", a.preset, "preset key or all");
  sweep->add_option("--L-values", a.l_values, "comma separated hardwired bits per port");

  auto* freq = app.add_subcommand("min-frequency", "lowest routable frequency, MCNF against greedy");
  add_common(freq, a);
  freq->add_option("--preset", a.preset, "preset key or all");

  auto* study = app.add_subcommand("mapping-study", "heuristic against random mappings");
  add_common(study, a);
  study->add_option("--preset", a.preset, "preset key");
  study->add_option("--K-random", a.k_random, "random mappings per seed");
  study->add_option("--seeds", a.seeds, "number of consecutive seeds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::Config);
  }

  try {
    if (*flow) return cmd_flow(a);
    if (*sweep) return cmd_sweep(a);
    if (*freq) return cmd_min_frequency(a);
    if (*study) return cmd_mapping_study(a);
  } catch (...) {
    const auto code = classify_current_exception();
    try {
      throw;
    } catch (const std::exception& e) {
      fmt::print(stderr, "error: {}\n", e.what());
    } catch (...) {
      fmt::print(stderr, "error\n");
    }
    return static_cast<int>(code);
  }
  return 0;
}
