#pragma once

#include <array>
#include <map>
#include <vector>

#include "mrmc/path.hpp"
#include "mrmc/profile.hpp"

namespace mrmc {

struct SearchOptions {
  int max_expansions = 200000;
  int extra_layers = 600;     // searched beyond the last finite window
  double inflate = kGeomEps;  // added to the footprint radius in every test
};

/// Rest-to-rest straight move: the fewest plan steps covering a leg, and the
/// lattice actions that do it.
class MoveTable {
 public:
  explicit MoveTable(const LatticeSpec& lattice) : lattice_(lattice) {}
  const std::vector<Action>& actions(int units);
  int steps(const Leg& leg);
  /// Arc length after each plan step of the translation part.
  std::vector<double> arc_samples(const Leg& leg);

 private:
  LatticeSpec lattice_;
  std::map<int, std::vector<Action>> cache_;
};

/// One motion primitive of the space-time search.
struct Primitive {
  bool hold = true;
  Vec2 target;
};

/// Time-expanded lattice: states are rest poses at cell centers, the start
/// point or the goal point, one layer per plan step. Moves go to the eight
/// neighboring cell centers (and the own center from off-center points) or to
/// the goal point when it lies in an adjacent cell; each move turns in place,
/// travels rest to rest in minimum time and never waits midway.
class SpaceTimeLattice {
 public:
  struct Node {
    Vec2 pos;
    double heading = 0.0;
    int layer = 0;
  };
  struct Successor {
    Primitive primitive;
    Node node;
  };
  using Key = std::array<long long, 4>;

  SpaceTimeLattice(const Workspace& ws, const LatticeSpec& lattice, double radius, const WindowMap& windows,
                   double t0, Vec2 start, Vec2 goal, SearchOptions options = {});

  void successors(const Node& n, std::vector<Successor>& out);
  [[nodiscard]] bool is_goal(const Node& n) const;
  [[nodiscard]] int heuristic(const Node& n) const;
  [[nodiscard]] Key key(const Node& n) const;
  [[nodiscard]] int layer_limit() const { return layer_limit_; }
  [[nodiscard]] bool goal_blocked_forever() const { return goal_block_until_ == kForever; }
  [[nodiscard]] Vec2 goal() const { return goal_; }
  [[nodiscard]] Vec2 start() const { return start_; }
  [[nodiscard]] const SearchOptions& options() const { return options_; }
  [[nodiscard]] double time(int layer) const;

  /// Static shortest route by distance between the same primitives, goal
  /// first point excluded. Empty when the goal is unreachable.
  [[nodiscard]] std::vector<Vec2> static_route() const;

 private:
  struct Box {
    double s_lo, s_hi, t_lo, t_hi;
  };
  struct MoveGeometry {
    bool free = false;
    Leg leg;
    std::vector<Box> boxes;
  };

  std::vector<Vec2> targets(Vec2 p) const;
  const MoveGeometry& geometry(Vec2 from, double heading, Vec2 to);
  const IntervalSet& point_windows(Vec2 p);
  bool blocked(const std::vector<Box>& boxes, double s_lo, double s_hi, int layer) const;
  void build_heuristic();
  int kind(Vec2 p) const;
  bool meets_closed(Vec2 a, Vec2 b) const;

  const Workspace* ws_;
  LatticeSpec lattice_;
  double radius_;
  const WindowMap* windows_;
  double t0_;
  Vec2 start_;
  Vec2 goal_;
  SearchOptions options_;
  MoveTable moves_;
  double goal_block_until_ = -kForever;
  int layer_limit_ = 0;
  std::vector<int> h_cell_;  // per cell center, in plan steps
  int h_start_ = 0;
  CellSet closed_;           // windowed from t0 on, forever
  std::map<std::array<long long, 5>, MoveGeometry> geometry_cache_;
  std::map<std::array<long long, 2>, IntervalSet> point_cache_;
};

struct SpaceTimeResult {
  bool feasible = false;
  int steps = 0;
  int expansions = 0;
  std::vector<Primitive> primitives;
};

/// A* over the lattice with f = layer + heuristic; ties prefer deeper nodes,
/// then the smaller state key.
SpaceTimeResult space_time_search(SpaceTimeLattice& lattice, double start_heading);

/// Turns a primitive sequence into lattice actions along the path it defines.
Path primitives_path(Vec2 start, double heading, const std::vector<Primitive>& primitives,
                     const LatticeSpec& lattice);
std::vector<Action> primitives_actions(const Path& path, const std::vector<Primitive>& primitives,
                                       MoveTable& moves);

}  // namespace mrmc
