#pragma once

#include <optional>
#include <stdexcept>

#include "mrmc/path.hpp"
#include "mrmc/priority.hpp"
#include "mrmc/profile.hpp"
#include "mrmc/spacetime.hpp"

namespace mrmc {

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlannerConfig {
  LatticeSpec lattice;
  double radius = 0.0;
  ProfileOptions profile;
  SearchOptions search;
};

enum class PlanOutcome { FixedPath, Replanned, Infeasible };
const char* to_string(PlanOutcome o);

struct PlanResult {
  PlanOutcome outcome = PlanOutcome::Infeasible;
  std::optional<MotionPlan> plan;

  [[nodiscard]] bool feasible() const { return outcome != PlanOutcome::Infeasible; }
};

/// Point of the goal rectangle where the whole footprint fits and is clear of
/// obstacles; the center when possible.
std::optional<Vec2> goal_point(const Workspace& ws, const Rect& goal, double radius);

bool footprint_inside(const Rect& region, Vec2 p, double radius);

/// Every sample passes check_limits with its outgoing input.
bool satisfies_limits(const Trajectory& trajectory, const Limits& limits);

/// Minimum-time plan from rest at `start` to the goal along the shortest grid
/// route, straightened where the free space allows.
/// Throws InfeasibleError when no goal point is reachable.
MotionPlan initial_plan(const Workspace& ws, const RobotState& start, const Rect& goal,
                        const PlannerConfig& config, double t0);

/// Re-times the remaining path of the plan `start` was cut from.
PlanResult fixed_path_plan(const Workspace& ws, const PlanStart& start, const WindowMap& windows,
                           const PlannerConfig& config);

/// New path and timing to `goal`. A moving robot first brakes on its current
/// path. Candidates are the raw space-time search result, its merged straight
/// runs re-timed, and the static route re-timed; the earliest arrival wins.
PlanResult trajectory_plan(const Workspace& ws, const PlanStart& start, Vec2 goal, const WindowMap& windows,
                           const PlannerConfig& config);

/// Windows restricted to the given cells.
WindowMap restrict_windows(const WindowMap& windows, const CellSet& cells);

struct CascadeResult {
  PlanResult result;
  Mode mode = Mode::Emerg;
  bool fixed_path_tried = false;
  bool trajectory_tried = false;
};

/// Fixed-path planning first; the trajectory planner only when that fails;
/// Emerg when both fail.
CascadeResult plan(const Workspace& ws, const MotionPlan& current, double t_c, Vec2 goal,
                   const WindowMap& fixed_path_windows, const WindowMap& trajectory_windows,
                   const PlannerConfig& config);

/// Emergency stops: finish any rigid block, then brake at -F_max; or freeze
/// in place at the next sample regardless of speed.
MotionPlan brake_plan(const MotionPlan& current, double t_c, const LatticeSpec& lattice);
MotionPlan halt_plan(const RobotState& state, double t_c, double dt);

}  // namespace mrmc
