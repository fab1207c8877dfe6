#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mrmc/conflict.hpp"

namespace mrmc {

enum class Lifecycle { Inactive, Active, Passive };
enum class Mode { Free, Busy, Emerg };

const char* to_string(Lifecycle l);
const char* to_string(Mode m);

/// What a robot shares with its neighbors before the planning order is fixed.
struct PriorityContext {
  int id = 0;
  int neighbor_count = 0;
  double earliest_entry = kForever;
  int base_priority = 0;
  Lifecycle lifecycle = Lifecycle::Active;
  Mode mode = Mode::Free;

  /// Robots whose plans are fixed constraints for everybody around them.
  [[nodiscard]] bool is_fixed() const {
    return lifecycle != Lifecycle::Active || mode == Mode::Emerg;
  }
};

/// Earliest left end of the robot's occupancy over the given conflict cells,
/// +inf when there are none.
double earliest_entry_time(const CellSet& conflict_cells, const OccupancyMap& occupancy, double t_c);

/// More sensing neighbors wins; on a tie the earlier conflict entry wins.
bool has_advantage(const PriorityContext& i, const PriorityContext& j);

/// Neighbors that plan before `self` (the set Y_i). Robots that are not
/// Active precede Emerg robots, which precede the rest; within a tier the
/// advantage relation decides, then the larger base priority.
/// Throws std::invalid_argument on repeated base priorities.
std::set<int> determine_order(const PriorityContext& self, std::span<const PriorityContext> neighbors);

/// Fleet-wide "plans before" relation of one connected component; an edge
/// j -> i means j ∈ Y_i.
class PriorityDigraph {
 public:
  void add_node(int id);
  void add_edge(int from, int to);

  [[nodiscard]] const std::set<int>& nodes() const { return nodes_; }
  [[nodiscard]] const std::map<int, std::set<int>>& edges() const { return out_; }
  [[nodiscard]] std::size_t edge_count() const;

  /// A directed cycle if one exists (first node repeated at the end), else empty.
  [[nodiscard]] std::vector<int> find_cycle() const;

  /// Topological layers: stage k holds nodes whose longest incoming chain has
  /// k edges. Requires an acyclic graph.
  [[nodiscard]] std::vector<std::vector<int>> stages() const;

  [[nodiscard]] std::string dump() const;

 private:
  std::set<int> nodes_;
  std::map<int, std::set<int>> out_;
};

bool check_acyclic(const PriorityDigraph& digraph);

}  // namespace mrmc
