#pragma once

#include <map>
#include <span>
#include <vector>

#include "mrmc/conflict.hpp"
#include "mrmc/dynamics.hpp"
#include "mrmc/workspace.hpp"

namespace mrmc {

/// Discretization shared by the speed-profile and space-time planners.
///
/// Translation happens in plan steps of `dt_plan` with the force input held
/// at -F_max, 0 or +F_max, so speeds live on multiples of `dv` and arc length
/// on multiples of `unit` = F_max * dt_plan^2 / 2. A step from speed level l
/// with acceleration a in {-1, 0, 1} advances 2l + a units.
struct LatticeSpec {
  Limits limits;
  double dt = 0.05;   // trajectory sample spacing
  int substeps = 2;   // samples per plan step
  double dv = 0.0;
  int levels = 0;     // highest speed level
  double unit = 0.0;

  [[nodiscard]] double dt_plan() const { return dt * substeps; }
  [[nodiscard]] double speed(int level) const;

  /// Throws std::invalid_argument unless dt_plan is a positive integer
  /// multiple of dt and the limits admit at least one speed level.
  static LatticeSpec make(const Limits& limits, double dt, double dt_plan);
};

/// Straight piece of a path. The robot reaches `start` at rest, turns in
/// place onto `heading` (a rigid block of `rotation_steps` plan steps),
/// covers `lattice_units` on the speed lattice and finishes the remaining
/// `creep` metres with a two-step rest-to-rest nudge.
struct Leg {
  Vec2 start;
  Vec2 end;
  Vec2 dir;
  double heading = 0.0;
  double length = 0.0;
  int lattice_units = 0;
  double creep = 0.0;
  double heading_before = 0.0;
  int rotation_steps = 0;

  [[nodiscard]] Vec2 at(double s) const { return start + s * dir; }
  [[nodiscard]] bool has_creep() const { return creep > 0.0; }
};

/// Polyline parameterized by arc length with a stop-and-turn at every vertex.
struct Path {
  Vec2 origin;
  double initial_heading = 0.0;
  std::vector<Leg> legs;

  [[nodiscard]] bool empty() const { return legs.empty(); }
  [[nodiscard]] Vec2 end() const { return legs.empty() ? origin : legs.back().end; }
  [[nodiscard]] double final_heading() const {
    return legs.empty() ? initial_heading : legs.back().heading;
  }
  [[nodiscard]] double length() const;
  [[nodiscard]] std::vector<Vec2> waypoints() const;
};

/// In-place turn: per-sample angular accelerations, padded with rest samples
/// to a whole number of plan steps.
struct RotationProfile {
  std::vector<double> alpha;
  int plan_steps = 0;
};
RotationProfile plan_rotation(double from, double to, const LatticeSpec& lattice);

/// Builds a path through the waypoints starting at `origin` with the given
/// heading. Zero-length pieces are dropped.
Path make_path(Vec2 origin, double initial_heading, std::span<const Vec2> waypoints,
               const LatticeSpec& lattice);

/// Where a plan sample sits on its path. `leg == legs.size()` means arrived.
struct Cursor {
  int leg = 0;
  int s_units = 0;
  int level = 0;
  bool before_rotation = false;  // at rest at the leg start, turn not begun
  bool decision = false;         // a replacement plan may branch off here
};

/// A trajectory together with the path it follows and, per sample, the
/// cursor on that path.
struct MotionPlan {
  Trajectory trajectory;
  Path path;
  std::vector<Cursor> cursors;

  [[nodiscard]] double start_time() const { return trajectory.start_time(); }
  [[nodiscard]] double arrival_time() const { return trajectory.end_time(); }
  [[nodiscard]] bool empty() const { return trajectory.empty(); }
};

/// A motion plan that keeps the robot where it is.
MotionPlan stationary_plan(const RobotState& state, double t, double dt);

/// Point at which a replacement for `plan` can take over at time t_c: the
/// committed samples up to the first decision sample at or after t_c, and
/// the remaining path re-indexed from the branch leg.
struct PlanStart {
  double t_c = 0.0;
  Trajectory prefix;            // from t_c to the branch sample, inclusive
  std::vector<Cursor> prefix_cursors;
  Path path;                    // remaining path
  Cursor cursor;                // branch cursor in `path` coordinates
  [[nodiscard]] const RobotState& state() const { return prefix.back(); }
  [[nodiscard]] double t_branch() const { return prefix.end_time(); }
};
PlanStart branch_point(const MotionPlan& plan, double t_c);

/// Discrete actions of the planners; each advances one plan step except the
/// rigid Rotate (leg rotation_steps) and Creep (two steps) blocks.
enum class Action { Hold, Accelerate, Cruise, Brake, Rotate, Creep };
int accel_of(Action a);

/// Appends samples to a plan by integrating the dynamics with the inputs each
/// action prescribes.
class PlanBuilder {
 public:
  PlanBuilder(const LatticeSpec& lattice, const PlanStart& start);

  void apply(Action action);
  [[nodiscard]] const Cursor& cursor() const { return cursor_; }
  [[nodiscard]] const RobotState& state() const { return plan_.trajectory.back(); }
  [[nodiscard]] double time() const { return plan_.trajectory.end_time(); }
  MotionPlan finish() &&;

 private:
  void push(const RobotState& s, const ControlInput& u, const Cursor& c);
  void normalize_cursor();

  LatticeSpec lattice_;
  MotionPlan plan_;
  Cursor cursor_;
};

/// Forbidden (cell, time) pairs a planner must keep its footprint out of.
using WindowMap = std::map<CellIndex, IntervalSet>;

struct ForbiddenWindow {
  CellIndex cell;
  Interval interval;
};
WindowMap to_window_map(std::span<const ForbiddenWindow> windows);

/// Adds occupancy of another robot restricted to `cells` (all when empty).
void add_windows(WindowMap& windows, const OccupancyMap& occupancy, const CellSet* cells = nullptr);

/// True iff the footprint swept along the trajectory from `from` on never
/// meets a forbidden cell during its window, the final pose included for the
/// remaining time.
bool complies(const Trajectory& trajectory, double from, double radius, const WindowMap& windows,
              const CellGrid& grid);

}  // namespace mrmc
