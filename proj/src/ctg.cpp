#include "sdmnoc/ctg.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "sdmnoc/rng.hpp"

namespace sdmnoc {

using nlohmann::json;

std::int64_t TaskGraph::total_demand(int task) const {
  std::int64_t sum = 0;
  for (const auto& f : flows) {
    if (f.src == task || f.dst == task) sum += f.demand_bps;
  }
  return sum;
}

namespace {

std::int64_t require_int(const json& obj, const char* key, std::size_t pos) {
  auto it = obj.find(key);
  if (it == obj.end()) throw CtgError(fmt::format("missing field \"{}\"", key), pos);
  if (!it->is_number_integer()) {
    throw CtgError(fmt::format("field \"{}\" must be an integer", key), pos);
  }
  if (it->is_number_unsigned() && it->get<std::uint64_t>() > INT64_MAX) {
    throw CtgError(fmt::format("field \"{}\" out of range", key), pos);
  }
  return it->get<std::int64_t>();
}

}  // namespace

TaskGraph parse_ctg(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw CtgError(fmt::format("syntax error: {}", e.what()), e.byte);
  }
  if (!doc.is_object()) throw CtgError("CTG document must be a JSON object", 0);

  TaskGraph g;
  const auto tasks = require_int(doc, "tasks", 0);
  if (tasks < 1 || tasks > 1'000'000) throw CtgError("\"tasks\" must be positive", 0);
  g.num_tasks = static_cast<int>(tasks);
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw CtgError("\"name\" must be a string", 0);
    g.name = it->get<std::string>();
  }
  auto flows = doc.find("flows");
  if (flows == doc.end() || !flows->is_array()) throw CtgError("\"flows\" must be an array", 0);

  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < flows->size(); ++i) {
    const auto& entry = (*flows)[i];
    if (!entry.is_object()) throw CtgError(fmt::format("flow {} is not an object", i), i);
    const auto src = require_int(entry, "src", i);
    const auto dst = require_int(entry, "dst", i);
    const auto demand = require_int(entry, "demand_bps", i);
    if (src < 0 || src >= tasks || dst < 0 || dst >= tasks) {
      throw CtgError(fmt::format("flow {} references a task outside 0..{}", i, tasks - 1), i);
    }
    if (src == dst) throw CtgError(fmt::format("flow {} is a self-loop", i), i);
    if (demand <= 0) throw CtgError(fmt::format("flow {} has non-positive demand", i), i);
    if (!seen.emplace(src, dst).second) {
      throw CtgError(fmt::format("duplicate flow {}->{} at index {}", src, dst, i), i);
    }
    g.flows.push_back(Flow{static_cast<int>(i), static_cast<int>(src), static_cast<int>(dst), demand});
  }
  return g;
}

std::string render_ctg(const TaskGraph& graph) {
  json doc;
  doc["tasks"] = graph.num_tasks;
  if (!graph.name.empty()) doc["name"] = graph.name;
  json flows = json::array();
  for (const auto& f : graph.flows) {
    flows.push_back({{"src", f.src}, {"dst", f.dst}, {"demand_bps", f.demand_bps}});
  }
  doc["flows"] = std::move(flows);
  return doc.dump(2) + "\n";
}

std::vector<std::string> validate_ctg(const TaskGraph& graph) {
  std::vector<std::string> out;
  if (graph.num_tasks < 1) out.push_back("task count must be positive");
  std::set<std::pair<int, int>> seen;
  for (std::size_t i = 0; i < graph.flows.size(); ++i) {
    const auto& f = graph.flows[i];
    if (f.id != static_cast<int>(i)) out.push_back(fmt::format("flow {} has id {}", i, f.id));
    const bool src_ok = f.src >= 0 && f.src < graph.num_tasks;
    const bool dst_ok = f.dst >= 0 && f.dst < graph.num_tasks;
    if (!src_ok || !dst_ok) out.push_back(fmt::format("flow {} has a dangling endpoint", i));
    if (f.src == f.dst) out.push_back(fmt::format("flow {} is a self-loop", i));
    if (f.demand_bps <= 0) out.push_back(fmt::format("flow {} has non-positive demand", i));
    if (!seen.emplace(f.src, f.dst).second) {
      out.push_back(fmt::format("duplicate flow {}->{}", f.src, f.dst));
    }
  }
  return out;
}

TaskGraph generate_synthetic_ctg(int n_tasks, int n_flows, std::int64_t demand_lo,
                                 std::int64_t demand_hi, std::uint64_t seed) {
  if (n_tasks < 1) throw std::invalid_argument("n_tasks must be positive");
  const auto max_flows = static_cast<std::int64_t>(n_tasks) * (n_tasks - 1);
  if (n_flows < 0 || n_flows > max_flows) {
    throw std::invalid_argument(
        fmt::format("cannot place {} flows among {} tasks (max {})", n_flows, n_tasks, max_flows));
  }
  if (demand_lo < 1 || demand_lo > demand_hi) {
    throw std::invalid_argument("demand range must satisfy 1 <= lo <= hi");
  }

  Rng rng(seed);
  std::vector<int> order(n_tasks);
  for (int i = 0; i < n_tasks; ++i) order[i] = i;
  rng.shuffle(std::span<int>(order));

  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> used;
  const int tree_edges = std::min(n_flows, n_tasks - 1);
  for (int i = 1; i <= tree_edges; ++i) {
    const int parent = order[rng.below(static_cast<std::uint64_t>(i))];
    edges.emplace_back(parent, order[i]);
    used.emplace(parent, order[i]);
  }

  std::vector<std::pair<int, int>> candidates;
  for (int s = 0; s < n_tasks; ++s) {
    for (int d = 0; d < n_tasks; ++d) {
      if (s != d && !used.contains({s, d})) candidates.emplace_back(s, d);
    }
  }
  const auto extra = static_cast<std::size_t>(n_flows - tree_edges);
  for (std::size_t i = 0; i < extra; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
    edges.push_back(candidates[i]);
  }

  TaskGraph g;
  g.num_tasks = n_tasks;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    g.flows.push_back(Flow{static_cast<int>(i), edges[i].first, edges[i].second,
                           rng.between(demand_lo, demand_hi)});
  }
  return g;
}

namespace {

constexpr std::array<BenchmarkPreset, 8> kPresets{{
    {"mwd", "Multi-Window Display", 13, 15, 4, 4},
    {"vopd", "Video Object Plane Decoder", 16, 21, 4, 4},
    {"mms", "Multi Media System", 27, 36, 5, 6},
    {"gsm-dec", "GSM decoder", 48, 73, 7, 7},
    {"gsm-enc", "GSM encoder", 36, 56, 6, 6},
    {"robot", "Robot", 81, 118, 9, 9},
    {"telecom", "Telecom", 24, 25, 6, 4},
    {"auto", "auto-industry", 22, 25, 6, 4},
}};

}  // namespace

std::span<const BenchmarkPreset> benchmark_presets() { return kPresets; }

const BenchmarkPreset& find_preset(std::string_view key) {
  for (const auto& p : kPresets) {
    if (p.key == key) return p;
  }
  throw std::invalid_argument(fmt::format("unknown preset \"{}\"", key));
}

TaskGraph preset_ctg(const BenchmarkPreset& preset, std::int64_t demand_lo,
                     std::int64_t demand_hi, std::uint64_t seed) {
  auto g = generate_synthetic_ctg(preset.tasks, preset.flows, demand_lo, demand_hi, seed);
  g.name = std::string(preset.key);
  return g;
}

}  // namespace sdmnoc
