#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sdmnoc/flow_network.hpp"
#include "sdmnoc/platform.hpp"

namespace sdmnoc {

enum class CrosspointKind : std::uint8_t { Configurable, Hardwired };

/// One unit-level connection inside a router. On the local port the unit
/// index is the lane's position within the flow's circuit.
struct Crosspoint {
  int node = 0;
  UnitRef in;
  UnitRef out;
  CrosspointKind kind = CrosspointKind::Configurable;
};

struct Branch {
  std::vector<int> nodes;               // source first
  std::vector<int> links;               // one per hop
  int width = 0;                        // units
  std::vector<std::vector<int>> units;  // [hop][lane] unit index on the link
  std::vector<Crosspoint> crosspoints;  // (hops+1) * width entries, router-major
  bool hardwired_lane = false;

  int hops() const { return static_cast<int>(links.size()); }
};

struct FlowCircuit {
  int flow_id = 0;
  int source = 0;
  int sink = 0;
  int requested_units = 0;  // minimum the flow asked for
  std::vector<Branch> branches;

  int units() const;
  int hops() const { return branches.empty() ? 0 : branches.front().hops(); }
};

struct CircuitPlan {
  int unit_width = 0;
  int units_per_link = 0;
  int hardwired_units = 0;
  /// Hardwired lane units that had to fall back to configurable crosspoints,
  /// counted once per transit router.
  int demotions = 0;
  std::vector<FlowCircuit> circuits;

  const FlowCircuit* find(int flow_id) const;
  int crosspoints(CrosspointKind kind) const;
};

class RealizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Splits each commodity's arc flow into equal-length branches and assigns
/// concrete unit indices. Configurable units come from [H, U); hardwired
/// lanes take indices in [0, H) that follow the router pattern, falling back
/// to configurable units (a demotion) where no pattern chain is free.
CircuitPlan realize_circuits(const FlowNetwork& net, const Allocation& a, const Platform& mesh);

/// Ledger audit: path shape, widths, unit exclusivity per link, and
/// crosspoint tags against the hardwired pattern.
std::vector<std::string> audit_circuit_plan(const CircuitPlan& plan, const Platform& mesh);

std::string render_circuit_plan(const CircuitPlan& plan, const Platform& mesh);
/// Rebuilds links from node paths; throws std::invalid_argument on bad input.
CircuitPlan parse_circuit_plan(std::string_view text, const Platform& mesh);

}  // namespace sdmnoc
