#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdmnoc/ctg.hpp"
#include "sdmnoc/mapping.hpp"
#include "sdmnoc/platform.hpp"

namespace sdmnoc {

struct UnitDemand {
  int flow_id = 0;
  int units = 0;
};

/// ceil(demand / unit bandwidth), in exact integer arithmetic.
UnitDemand compute_unit_demand(const Flow& f, const MeshConfig& cfg);
std::vector<UnitDemand> compute_unit_demands(const TaskGraph& g, const MeshConfig& cfg);

struct ArcCosts {
  int regular = 2;
  int hardwired = 1;
};

enum class ArcKind : std::uint8_t { Regular, Hardwired };

/// One of the two parallel arcs of a directed mesh link. Arc 2l is the regular
/// arc of link l, arc 2l+1 the hardwired arc.
struct Arc {
  int link = 0;
  ArcKind kind = ArcKind::Regular;
  int from = 0;
  int to = 0;
  int capacity = 0;
  int cost = 0;
};

inline int regular_arc(int link) { return 2 * link; }
inline int hardwired_arc(int link) { return 2 * link + 1; }

struct Commodity {
  int flow_id = 0;
  int source = 0;
  int sink = 0;
  int demand = 0;  // units
  Coord src_xy;
  Coord dst_xy;

  int dx() const { return dst_xy.x - src_xy.x; }
  int dy() const { return dst_xy.y - src_xy.y; }
  int hops() const { return manhattan_dist(src_xy, dst_xy); }
  /// Source and sink share a row or column: exactly one minimal path.
  bool straight() const { return dx() == 0 || dy() == 0; }
  bool in_rectangle(Coord c) const;
};

/// Multi-commodity flow instance over a mesh. Regular arcs may be used by any
/// commodity inside its bounding rectangle, moving toward its sink. Hardwired
/// arcs form straight same-index lanes, so they are admissible only to
/// straight commodities, and a commodity's hardwired flow must be identical
/// on every link of its path.
class FlowNetwork {
 public:
  FlowNetwork(const Platform& mesh, std::vector<Arc> arcs, std::vector<Commodity> commodities,
              ArcCosts costs);

  const Platform& mesh() const { return *mesh_; }
  std::span<const Arc> arcs() const { return arcs_; }
  std::span<const Commodity> commodities() const { return commodities_; }
  const ArcCosts& costs() const { return costs_; }
  int num_arcs() const { return static_cast<int>(arcs_.size()); }
  int num_commodities() const { return static_cast<int>(commodities_.size()); }

  bool admissible(int commodity, int arc) const;
  /// Admissible arcs of a commodity, ascending.
  const std::vector<int>& admissible_arcs(int commodity) const { return admissible_[commodity]; }
  /// Links of the unique path of a straight commodity, source first.
  std::vector<int> straight_path(int commodity) const;

  /// Commodity demand override, used when circuits are widened.
  void set_demand(int commodity, int units) { commodities_[commodity].demand = units; }

 private:
  const Platform* mesh_;
  std::vector<Arc> arcs_;
  std::vector<Commodity> commodities_;
  ArcCosts costs_;
  std::vector<std::vector<int>> admissible_;
};

FlowNetwork build_flow_network(const Platform& mesh, const Mapping& p, const TaskGraph& g,
                               std::span<const UnitDemand> demands, ArcCosts costs = {});

/// Integer units per commodity per arc.
struct Allocation {
  std::vector<std::vector<int>> units;  // [commodity][arc]

  static Allocation empty(const FlowNetwork& net);
  std::vector<int> arc_loads() const;
  friend bool operator==(const Allocation&, const Allocation&) = default;
};

std::int64_t allocation_cost(const FlowNetwork& net, const Allocation& a);

/// Conservation, demand, capacity, admissibility and hardwired-lane checks.
std::vector<std::string> audit_allocation(const FlowNetwork& net, const Allocation& a);

enum class RouteStatus { Feasible, Infeasible };

struct RouteResult {
  RouteStatus status = RouteStatus::Infeasible;
  Allocation allocation;
  std::int64_t cost = 0;

  bool feasible() const { return status == RouteStatus::Feasible; }
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExactOptions {
  std::uint64_t node_budget = 50'000'000;
  std::size_t memo_limit = 4'000'000;
};

/// Branch-and-bound over per-commodity integer arc flows with memoised
/// residual states. Throws BudgetExceeded when the search budget runs out.
RouteResult solve_mcnf_exact(const FlowNetwork& net, const ExactOptions& opts = {});

struct HeuristicOptions {
  int max_iters = 64;
  double present_factor = 0.5;
  double present_growth = 1.6;
  double history_factor = 0.4;
};

/// Negotiated-congestion rip-up and reroute.
RouteResult solve_mcnf_heuristic(const FlowNetwork& net, const HeuristicOptions& opts = {});

/// Greedy unsplit baseline: flows in decreasing units/path_count order, each
/// reserving its whole demand on the best minimal path that still fits.
RouteResult route_greedy_baseline(const FlowNetwork& net);

/// Ordering key of the greedy baseline: units / number of minimal paths.
double greedy_key(const Commodity& c);

/// Number of minimal lattice paths C(|dx|+|dy|, |dx|).
double minimal_path_count(int dx, int dy);

/// Every minimal path of a commodity as link ids, x-steps explored first.
std::vector<std::vector<int>> enumerate_minimal_paths(const FlowNetwork& net, int commodity);

/// Links of a path given by its node sequence.
std::vector<int> path_links(const Platform& mesh, std::span<const int> nodes);

/// Adds spare capacity to circuits in order of packet-rate-weighted
/// serialisation gain. Commodity demands in `net` grow with the allocation.
/// `weights[k]` is the relative packet rate of commodity k.
void widen_allocation(FlowNetwork& net, Allocation& a, std::span<const double> weights,
                      int packet_bits);

}  // namespace sdmnoc
