#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdmnoc/ctg.hpp"
#include "sdmnoc/frequency.hpp"
#include "sdmnoc/mapping.hpp"
#include "sdmnoc/metrics.hpp"
#include "sdmnoc/platform.hpp"
#include "sdmnoc/sim.hpp"

namespace sdmnoc {

enum class ExitCode : int { Ok = 0, Config = 2, MappingInfeasible = 3, RoutingInfeasible = 4, SimFailure = 5 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RoutingInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maps the exception currently being handled to an exit code.
ExitCode classify_current_exception();

enum class MappingChoice { Heuristic, Random, Exhaustive };

std::string_view mapping_name(MappingChoice m);
MappingChoice parse_mapping(std::string_view name);

/// Demand range of the synthetic preset graphs, bits per second.
inline constexpr std::int64_t kPresetDemandLo = 64'000'000;
inline constexpr std::int64_t kPresetDemandHi = 4'096'000'000;

struct ExperimentConfig {
  PlatformSpec platform;
  CostModel cost_model;
  SolverChoice solver = SolverChoice::Heuristic;
  MappingChoice mapping = MappingChoice::Heuristic;
  std::uint64_t seed = 1;
  std::int64_t horizon = 20'000;
  int packet_bits = 1024;
  /// Peak XY channel load over channel capacity at the matched frequency.
  double utilization = 0.5;
  bool widen = true;
  WormholeConfig wormhole;
  int threads = 0;  // 0: hardware concurrency
};

std::string read_text_file(const std::filesystem::path& path);
std::string default_platform_path();

/// Peak demand over all XY channels, injection and ejection included, in b/s.
std::int64_t peak_xy_channel_load(const TaskGraph& g, const Platform& mesh, const Mapping& p);

/// ceil(peak load / (utilization * N)).
std::uint64_t load_frequency(const TaskGraph& g, const Platform& mesh, const Mapping& p,
                             double utilization);

Mapping choose_mapping(const TaskGraph& g, const Platform& mesh, MappingChoice m, std::uint64_t seed);

struct FlowRun {
  TaskGraph graph;
  PlatformSpec spec;  // frequency set to the operating point
  Mapping mapping;
  RoutedDesign design;
  Workload workload;
  SimResult sdm;
  SimResult base;
  PowerReport sdm_power;
  PowerReport base_power;
  AreaReport sdm_area;
  AreaReport base_area;
  Comparison ratios;

  std::uint64_t frequency_hz() const { return spec.config.frequency_hz; }
};

struct FlowOptions {
  std::optional<Mapping> mapping;          // skips the mapping step
  std::optional<std::uint64_t> frequency;  // skips the frequency search
  bool simulate_baseline = true;
};

/// Map, pick the matched operating frequency, route, realize, simulate both
/// designs on the same workload and estimate power and area.
FlowRun run_flow(const TaskGraph& g, const ExperimentConfig& cfg, const FlowOptions& opts = {});

/// `# ctg=<sha> platform=<sha> cost_model=<sha>`
std::string provenance_line(const std::vector<TaskGraph>& graphs, const PlatformSpec& spec,
                            const CostModel& cm);

/// mapping.json, circuits.json, sim_sdm.csv, sim_base.csv, power.csv, compare.csv
void write_flow_artifacts(const FlowRun& run, const ExperimentConfig& cfg,
                          const std::filesystem::path& dir);

/// Preset graph placed on the preset's mesh size.
struct PresetCase {
  TaskGraph graph;
  PlatformSpec spec;
};

PresetCase preset_case(const BenchmarkPreset& preset, const PlatformSpec& base, std::uint64_t seed);

struct SweepPoint {
  std::string benchmark;
  int hardwired_bits = 0;
  bool feasible = false;
  std::uint64_t frequency_hz = 0;
  double total_power_w = 0.0;
  double ratio = 0.0;  // against L = 0, 0 when infeasible
  std::string note;
};

/// Per case: the operating frequency is fixed by the L = 0 flow, then every L
/// is routed at that frequency and simulated.
std::vector<SweepPoint> sweep_hardwired(const std::vector<PresetCase>& cases,
                                        const std::vector<int>& l_values, const ExperimentConfig& cfg);
std::string render_sweep_csv(const std::vector<SweepPoint>& points, const std::string& provenance);

struct FrequencyPoint {
  std::string benchmark;
  std::optional<std::uint64_t> mcnf_hz;
  std::optional<std::uint64_t> greedy_hz;
  std::string note;

  /// mcnf / greedy, empty unless both exist.
  std::optional<double> ratio() const;
};

std::vector<FrequencyPoint> min_frequency_study(const std::vector<PresetCase>& cases,
                                                const ExperimentConfig& cfg);
std::string render_frequency_csv(const std::vector<FrequencyPoint>& points, const std::string& provenance);

struct MappingPoint {
  std::uint64_t seed = 0;
  std::string mode;  // "heuristic" or "random"
  int index = 0;
  bool ok = false;
  double latency_ratio = 0.0;  // sdm / baseline
  double power_ratio = 0.0;
  std::string note;

  double latency_improvement() const { return 1.0 - latency_ratio; }
  double power_improvement() const { return 1.0 - power_ratio; }
};

/// For every seed: one heuristic mapping and `k_random` random mappings of the
/// preset graph drawn with that seed.
std::vector<MappingPoint> mapping_study(const BenchmarkPreset& preset, const std::vector<std::uint64_t>& seeds,
                                        int k_random, const ExperimentConfig& cfg);
std::string render_mapping_study_csv(const std::vector<MappingPoint>& points, const std::string& provenance);

/// Runs fn(0..n-1) on a bounded pool of threads. The first exception is
/// rethrown after all workers stop.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace sdmnoc
