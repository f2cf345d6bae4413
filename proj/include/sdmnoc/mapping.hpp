#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdmnoc/ctg.hpp"
#include "sdmnoc/platform.hpp"

namespace sdmnoc {

/// Injective placement of tasks onto mesh nodes.
struct Mapping {
  std::vector<int> node_of_task;

  friend bool operator==(const Mapping&, const Mapping&) = default;
};

class MappingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_valid_mapping(const TaskGraph& g, const Platform& mesh, const Mapping& p);

/// Sum over flows of demand x Manhattan distance between mapped endpoints.
std::int64_t mapping_cost(const TaskGraph& g, const Platform& mesh, const Mapping& p);

/// Cost after the constructive phase followed by the cost after every
/// accepted swap.
struct MappingTrace {
  std::vector<std::int64_t> costs;
};

/// Constructive placement (heaviest task at the centre, then the task with
/// most traffic to the placed set at its cheapest free node) followed by
/// steepest-descent pairwise swaps, empty nodes included. Exact score ties
/// are broken by a seed-derived priority order.
Mapping map_tasks_heuristic(const TaskGraph& g, const Platform& mesh, std::uint64_t seed,
                            MappingTrace* trace = nullptr);

Mapping map_tasks_random(const TaskGraph& g, const Platform& mesh, std::uint64_t seed);

/// Globally optimal placement; the lexicographically smallest node vector wins
/// ties. Throws MappingError when the placement count exceeds the guard.
Mapping map_tasks_exhaustive(const TaskGraph& g, const Platform& mesh,
                             std::uint64_t max_placements = 10'000'000);

std::string render_mapping(const TaskGraph& g, const Platform& mesh, const Mapping& p);

}  // namespace sdmnoc
