#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdmnoc/platform.hpp"
#include "sdmnoc/sim.hpp"

namespace sdmnoc {

/// Energy per event in joules. Buffer and crosspoint events are per m-bit unit.
struct EnergyCoefficients {
  double buffer_write = 0.0;
  double buffer_read = 0.0;
  double crosspoint_configurable = 0.0;
  double crosspoint_hardwired = 0.0;
  double link_per_bit_per_hop = 0.0;
  double arbiter_decision = 0.0;
  double route_compute = 0.0;
};

/// Leakage in watts per component instance.
struct LeakageCoefficients {
  double buffer_per_flit_slot = 0.0;
  double crosspoint_configurable = 0.0;
  double crosspoint_hardwired = 0.0;
  double link_per_bit = 0.0;
};

/// Relative area per component instance.
struct AreaCoefficients {
  double buffer_per_flit_slot = 0.0;
  double crosspoint_configurable = 0.0;
  double crosspoint_hardwired = 0.0;
  double link_per_bit = 0.0;
  double arbiter = 0.0;
  double route_compute = 0.0;
};

struct CostModel {
  EnergyCoefficients energy;
  LeakageCoefficients leakage;
  AreaCoefficients area;
};

class CostModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> validate_cost_model(const CostModel& cm);
/// Every field is required. Throws CostModelError.
CostModel parse_cost_model(std::string_view text);
std::string render_cost_model(const CostModel& cm);
CostModel default_cost_model();
std::string default_cost_model_path();

enum class DesignKind { Sdm, Wormhole };

struct DesignDescriptor {
  DesignKind kind = DesignKind::Sdm;
  int buffer_depth = 8;  // wormhole flits per input port
};

/// Instantiated hardware of a whole mesh.
struct ComponentCounts {
  std::uint64_t buffer_slots = 0;     // wormhole input buffers, N-bit flit slots
  std::uint64_t pipeline_registers = 0;  // SDM input registers, N-bit
  std::uint64_t crosspoints_configurable = 0;
  std::uint64_t crosspoints_hardwired = 0;
  std::uint64_t link_bits = 0;
  std::uint64_t arbiters = 0;
  std::uint64_t route_units = 0;
};

ComponentCounts count_components(const Platform& mesh, const DesignDescriptor& d);

using Breakdown = std::vector<std::pair<std::string, double>>;

double breakdown_sum(const Breakdown& b);

struct PowerReport {
  std::string design;
  double dynamic_w = 0.0;
  double leakage_w = 0.0;
  double total_w = 0.0;
  Breakdown dynamic_breakdown;
  Breakdown leakage_breakdown;
};

struct AreaReport {
  std::string design;
  double total = 0.0;
  Breakdown breakdown;
};

/// Dynamic power is event energy times frequency over the simulated cycles.
/// SDM input-register traffic is reported as "pipeline_register" and charged
/// with the buffer write/read energies.
PowerReport estimate_power(const SimResult& r, const Platform& mesh, const DesignDescriptor& d,
                           const CostModel& cm, std::int64_t sim_cycles, std::uint64_t frequency_hz);

AreaReport estimate_area(const Platform& mesh, const DesignDescriptor& d, const CostModel& cm);

struct Comparison {
  double latency = 1.0;
  double dynamic_power = 1.0;
  double leakage_power = 1.0;
  double total_power = 1.0;
  double area = 1.0;
};

/// Proposed over baseline.
Comparison compare(const SimResult& sdm, const PowerReport& sdm_power, const AreaReport& sdm_area,
                   const SimResult& base, const PowerReport& base_power, const AreaReport& base_area);

/// `metric,sdm,baseline,ratio`
std::string render_compare_csv(const Comparison& ratios, const SimResult& sdm,
                               const PowerReport& sdm_power, const AreaReport& sdm_area,
                               const SimResult& base, const PowerReport& base_power,
                               const AreaReport& base_area);

/// `design,component,dynamic_w,leakage_w,area`
std::string render_power_csv(const std::vector<std::pair<PowerReport, AreaReport>>& designs);
std::string render_power_json(const PowerReport& p, const AreaReport& a);

}  // namespace sdmnoc
