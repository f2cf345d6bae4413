#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sdmnoc {

/// One directed communication flow between two tasks.
struct Flow {
  int id = 0;
  int src = 0;
  int dst = 0;
  std::int64_t demand_bps = 0;  // bits per second, > 0

  friend bool operator==(const Flow&, const Flow&) = default;
};

/// Communication task graph: dense task indices 0..num_tasks-1 and the flows
/// between them. Flow ids equal their position in `flows`.
struct TaskGraph {
  int num_tasks = 0;
  std::vector<Flow> flows;
  std::string name;

  std::int64_t total_demand(int task) const;

  friend bool operator==(const TaskGraph&, const TaskGraph&) = default;
};

class CtgError : public std::runtime_error {
 public:
  CtgError(const std::string& what, std::size_t position)
      : std::runtime_error(what), position_(position) {}
  /// Byte offset for syntax errors, flow index for semantic errors.
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the JSON CTG format
/// `{"tasks": n, "flows": [{"src":i,"dst":j,"demand_bps":d}, ...], "name": s}`.
/// Demands must be JSON integers; floats are rejected.
TaskGraph parse_ctg(std::string_view text);

std::string render_ctg(const TaskGraph& graph);

/// Every violated invariant as a human-readable line; empty means valid.
std::vector<std::string> validate_ctg(const TaskGraph& graph);

/// Seeded random CTG. Builds a random spanning arborescence first (so the
/// graph is weakly connected once n_flows >= n_tasks-1), then draws the
/// remaining flows uniformly from unused ordered pairs. Demands are uniform
/// in [demand_lo, demand_hi].
TaskGraph generate_synthetic_ctg(int n_tasks, int n_flows, std::int64_t demand_lo,
                                 std::int64_t demand_hi, std::uint64_t seed);

struct BenchmarkPreset {
  std::string_view key;
  std::string_view title;
  int tasks;
  int flows;
  int rows;
  int cols;
};

/// The eight published benchmark shapes (task count, flow count, mesh size).
std::span<const BenchmarkPreset> benchmark_presets();

/// Throws std::invalid_argument for unknown keys.
const BenchmarkPreset& find_preset(std::string_view key);

TaskGraph preset_ctg(const BenchmarkPreset& preset, std::int64_t demand_lo,
                     std::int64_t demand_hi, std::uint64_t seed);

}  // namespace sdmnoc
