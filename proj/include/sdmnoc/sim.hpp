#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdmnoc/circuits.hpp"
#include "sdmnoc/ctg.hpp"
#include "sdmnoc/mapping.hpp"
#include "sdmnoc/platform.hpp"

namespace sdmnoc {

enum class InjectionMode { Periodic, Bernoulli };

struct WorkloadOptions {
  int packet_bits = 1024;
  InjectionMode mode = InjectionMode::Periodic;
};

struct FlowSchedule {
  int flow_id = 0;
  std::int64_t period = 0;  // cycles between packets
  std::int64_t phase = 0;
  std::vector<std::int64_t> cycles;  // non-decreasing
};

struct Workload {
  int packet_bits = 1024;
  std::vector<FlowSchedule> flows;
  std::vector<std::string> warnings;
};

/// One packet per period = round(packet_bits * f / demand) cycles, with a
/// seeded phase, or Bernoulli arrivals at the same mean rate.
Workload generate_workload(const TaskGraph& g, const MeshConfig& cfg, std::int64_t horizon,
                           std::uint64_t seed, const WorkloadOptions& opts = {});

struct PacketRecord {
  int flow_id = 0;
  std::int64_t created = 0;
  std::int64_t delivered = 0;
  int hops = 0;

  std::int64_t latency() const { return delivered - created; }
};

struct FlowStats {
  int flow_id = 0;
  std::int64_t injected = 0;
  std::int64_t delivered = 0;
  double avg_latency = 0.0;
  std::int64_t max_latency = 0;
};

/// Unit-slot and traversal counts at one router.
struct RouterEvents {
  std::uint64_t buffer_writes = 0;  // m-bit unit slots
  std::uint64_t buffer_reads = 0;
  std::uint64_t crosspoint_configurable = 0;  // m-bit unit traversals
  std::uint64_t crosspoint_hardwired = 0;
  std::uint64_t arbitrations = 0;
  std::uint64_t route_computes = 0;
};

struct SimResult {
  std::string design;  // "sdm" or "wormhole"
  std::int64_t horizon = 0;
  std::int64_t cycles_run = 0;
  int units_per_link = 0;
  std::vector<FlowStats> flows;
  std::vector<PacketRecord> packets;
  std::vector<std::uint64_t> unit_active;  // [link * units_per_link + unit]
  std::vector<RouterEvents> routers;
  std::uint64_t link_bit_hops = 0;
  std::uint64_t multipath_chunks = 0;
  std::uint64_t simultaneity_violations = 0;
  bool saturated = false;

  std::int64_t injected() const;
  std::int64_t delivered() const;
  double mean_latency() const;
  RouterEvents total_events() const;
};

class SimError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimOptions {
  /// Extra cycles allowed after the horizon for in-flight packets, as a
  /// multiple of the horizon.
  int drain_factor = 4;
};

/// Chunk-level cycle simulation of dedicated circuits: one chunk per cycle
/// enters every branch, one register per hop.
SimResult simulate_sdm(const Platform& mesh, const CircuitPlan& plan, const Workload& w,
                       std::int64_t horizon, const SimOptions& opts = {});

struct WormholeConfig {
  int buffer_depth = 8;     // flits per input port
  int router_stages = 2;    // per hop, before the link
  int link_cycles = 1;
};

/// Single-VC wormhole mesh with XY routing, look-ahead route computation,
/// credit flow control and round-robin output arbitration. Flits are N bits.
SimResult simulate_wormhole(const Platform& mesh, const Mapping& p, const TaskGraph& g,
                            const Workload& w, std::int64_t horizon,
                            const WormholeConfig& cfg = {}, const SimOptions& opts = {});

/// Latency of every packet of a flow on a circuit of `width_bits` over
/// `hops` hops: S + H - 1 + Q, with Q the wait behind earlier packets.
std::vector<std::int64_t> sdm_closed_form(const std::vector<std::int64_t>& created, int packet_bits,
                                          int width_bits, int hops);

/// Zero-load wormhole latency H * (stages + link) + flits - 1.
std::int64_t wormhole_zero_load(int hops, int flits, const WormholeConfig& cfg = {});

std::string render_sim_json(const SimResult& r);
/// `flow_id,packets,avg_latency,max_latency`
std::string render_flow_csv(const SimResult& r);
/// `link_id,unit_id,active_cycles`, active units only.
std::string render_link_csv(const SimResult& r);

}  // namespace sdmnoc
