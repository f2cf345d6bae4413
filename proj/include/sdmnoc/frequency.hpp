#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sdmnoc/circuits.hpp"
#include "sdmnoc/ctg.hpp"
#include "sdmnoc/flow_network.hpp"
#include "sdmnoc/mapping.hpp"
#include "sdmnoc/platform.hpp"

namespace sdmnoc {

enum class SolverChoice { Exact, Heuristic, Greedy };

std::string_view solver_name(SolverChoice s);
/// Throws std::invalid_argument for unknown names.
SolverChoice parse_solver(std::string_view name);

struct RouteOptions {
  SolverChoice solver = SolverChoice::Heuristic;
  ArcCosts costs;
  ExactOptions exact;
  HeuristicOptions heuristic;
  /// Hand spare units to circuits after routing.
  bool widen = false;
  int packet_bits = 1024;
};

/// A routed and realized design on one platform.
struct RoutedDesign {
  std::vector<UnitDemand> demands;
  Allocation allocation;
  std::int64_t cost = 0;
  CircuitPlan plan;
};

RouteResult solve(const FlowNetwork& net, const RouteOptions& opts);

/// Routes every flow of `g` on `mesh`; empty when the solver finds no
/// feasible allocation.
std::optional<RoutedDesign> route_design(const TaskGraph& g, const Platform& mesh, const Mapping& p,
                                         const RouteOptions& opts);

struct FrequencyGrid {
  std::uint64_t f0 = 1;
  double ratio = 1.05;
  int max_steps = 400;

  /// ceil(f0 * ratio^k), in Hz.
  std::uint64_t at(int k) const;
};

/// Lowest frequency worth trying: every flow must fit in the two links
/// leaving its source inside its rectangle.
std::uint64_t frequency_floor(const TaskGraph& g, const MeshConfig& cfg);

class NoFeasibleFrequency : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FrequencyResult {
  std::uint64_t frequency_hz = 0;
  int step = 0;
  RoutedDesign design;
};

/// Smallest grid frequency at which the solver routes all flows. Doubles the
/// step index until a feasible point appears, then bisects.
FrequencyResult find_min_feasible_frequency(const TaskGraph& g, const PlatformSpec& spec,
                                            const Mapping& p, const RouteOptions& opts,
                                            const FrequencyGrid& grid);

}  // namespace sdmnoc
