#pragma once

#include <cstdint>
#include <vector>

#include "mrmc/path.hpp"

namespace mrmc {

/// What counts as arriving at the end of the path.
enum class Terminal {
  Stop,  // at rest on the final point, and allowed to stay there forever
  Free,  // first time the final point is reached, any speed
};

struct ProfileOptions {
  Terminal terminal = Terminal::Stop;
  int max_layers = 6000;       // plan steps searched before windows are treated as permanent
  double inflate = kGeomEps;   // added to the footprint radius in window tests
};

struct ProfileResult {
  bool feasible = false;
  int steps = 0;                // arrival time in plan steps
  std::vector<Action> actions;  // rigid blocks appear once
};

/// Minimum-time motion along a fixed path that keeps the footprint out of
/// every forbidden window.
///
/// The search is a layered breadth-first sweep over (leg, arc-length unit,
/// speed level) states, one layer per plan step, until every window has
/// either ended or become permanent; the remaining time-invariant problem is
/// finished with a backward shortest-path table. Windows become boxes in
/// (arc length, time) per leg; a step is blocked if its arc and its time span
/// both meet a box (closed sets).
class SpeedProfiler {
 public:
  SpeedProfiler(const Path& path, const LatticeSpec& lattice, double radius, const CellGrid& grid,
                const WindowMap& windows, double t0, ProfileOptions options = {});

  ProfileResult solve(const Cursor& start);

  [[nodiscard]] std::size_t node_count() const { return node_leg_.size(); }

 private:
  struct Box {
    double s_lo, s_hi, t_lo, t_hi;
  };
  struct Edge {
    int to;
    Action action;
    int duration;
    int leg;       // geometry leg index
    double s_lo;
    double s_hi;
  };

  int t_node(int leg, int s, int level) const;
  int entry_node(int leg) const;
  int node_of(const Cursor& c) const;
  void build_nodes();
  void build_edges();
  void build_boxes(const WindowMap& windows);
  double layer_time(int layer) const;
  const std::vector<ParamRange>& active(int leg, int layer);
  bool edge_valid(const Edge& e, int layer);
  bool static_valid(const Edge& e) const;
  bool end_valid(int layer) const;
  bool is_goal(int node, int layer) const;
  void static_table();

  Path path_;
  LatticeSpec lattice_;
  double radius_;
  const CellGrid* grid_;
  double t0_;
  ProfileOptions options_;

  std::vector<Leg> geom_;  // path legs, or one zero-length piece for an empty path
  std::vector<int> w_base_;
  std::vector<int> t_base_;
  int end_node_ = 0;
  std::vector<int> node_leg_;
  std::vector<std::vector<Edge>> out_;
  std::vector<std::vector<std::pair<int, int>>> in_;  // (source node, edge index)

  std::vector<std::vector<Box>> boxes_;  // per geometry leg
  int horizon_layer_ = 0;                // first layer after every finite window
  std::vector<std::vector<ParamRange>> static_ranges_;
  double end_block_until_ = -kForever;
  bool end_static_block_ = false;
  std::vector<std::vector<std::vector<ParamRange>>> active_;  // [layer][leg]
  std::vector<char> active_built_;
  std::vector<int> goals_;
  std::vector<int> h_;
};

/// Convenience wrapper: profile from `start` along `path` starting at time t0.
ProfileResult plan_profile(const Path& path, const Cursor& start, double t0, const WindowMap& windows,
                           double radius, const CellGrid& grid, const LatticeSpec& lattice,
                           ProfileOptions options = {});

/// Builds the trajectory for a profile computed from `start`.
MotionPlan build_plan(const PlanStart& start, const std::vector<Action>& actions, const LatticeSpec& lattice);

}  // namespace mrmc
