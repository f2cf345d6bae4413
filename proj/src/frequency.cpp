#include "sdmnoc/frequency.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sdmnoc {

std::string_view solver_name(SolverChoice s) {
  switch (s) {
    case SolverChoice::Exact: return "exact";
    case SolverChoice::Heuristic: return "heuristic";
    case SolverChoice::Greedy: return "greedy";
  }
  return "?";
}

SolverChoice parse_solver(std::string_view name) {
  if (name == "exact") return SolverChoice::Exact;
  if (name == "heuristic") return SolverChoice::Heuristic;
  if (name == "greedy") return SolverChoice::Greedy;
  throw std::invalid_argument(fmt::format("unknown solver '{}'", name));
}

RouteResult solve(const FlowNetwork& net, const RouteOptions& opts) {
  switch (opts.solver) {
    case SolverChoice::Exact: return solve_mcnf_exact(net, opts.exact);
    case SolverChoice::Heuristic: return solve_mcnf_heuristic(net, opts.heuristic);
    case SolverChoice::Greedy: return route_greedy_baseline(net);
  }
  throw std::logic_error("unreachable solver choice");
}

std::optional<RoutedDesign> route_design(const TaskGraph& g, const Platform& mesh, const Mapping& p,
                                         const RouteOptions& opts) {
  RoutedDesign d;
  d.demands = compute_unit_demands(g, mesh.config());
  auto net = build_flow_network(mesh, p, g, d.demands, opts.costs);
  auto r = solve(net, opts);
  if (!r.feasible()) return std::nullopt;
  d.cost = r.cost;
  d.allocation = std::move(r.allocation);
  if (opts.widen) {
    std::vector<double> weights;
    for (const auto& c : net.commodities()) {
      weights.push_back(static_cast<double>(g.flows[c.flow_id].demand_bps));
    }
    widen_allocation(net, d.allocation, weights, opts.packet_bits);
  }
  d.plan = realize_circuits(net, d.allocation, mesh);
  for (std::size_t k = 0; k < d.plan.circuits.size(); ++k) {
    d.plan.circuits[k].requested_units = d.demands[k].units;
  }
  return d;
}

std::uint64_t FrequencyGrid::at(int k) const {
  const long double f = static_cast<long double>(f0) * std::pow(static_cast<long double>(ratio), k);
  return static_cast<std::uint64_t>(std::ceil(f - 1e-9L));
}

std::uint64_t frequency_floor(const TaskGraph& g, const MeshConfig& cfg) {
  std::int64_t peak = 0;
  for (const auto& f : g.flows) peak = std::max(peak, f.demand_bps);
  const auto per_cycle = static_cast<std::uint64_t>(2 * cfg.link_width);
  return std::max<std::uint64_t>(1, (static_cast<std::uint64_t>(peak) + per_cycle - 1) / per_cycle);
}

FrequencyResult find_min_feasible_frequency(const TaskGraph& g, const PlatformSpec& spec,
                                            const Mapping& p, const RouteOptions& opts,
                                            const FrequencyGrid& grid) {
  auto attempt = [&](int k) -> std::optional<RoutedDesign> {
    MeshConfig cfg = spec.config;
    cfg.frequency_hz = grid.at(k);
    const Platform mesh(cfg, spec.pattern);
    return route_design(g, mesh, p, opts);
  };

  int lo = -1, hi = 0;
  std::optional<RoutedDesign> best = attempt(0);
  int step = 1;
  while (!best) {
    lo = hi;
    hi = std::min(grid.max_steps, hi + step);
    step *= 2;
    best = attempt(hi);
    if (!best && hi == grid.max_steps) {
      throw NoFeasibleFrequency(fmt::format("{} finds no routing up to {} Hz",
                                            solver_name(opts.solver), grid.at(grid.max_steps)));
    }
  }
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (auto d = attempt(mid)) {
      hi = mid;
      best = std::move(d);
    } else {
      lo = mid;
    }
  }
  return {grid.at(hi), hi, std::move(*best)};
}

}  // namespace sdmnoc
