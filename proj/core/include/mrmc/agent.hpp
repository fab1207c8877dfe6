#pragma once

#include <map>
#include <optional>

#include "mrmc/conflict.hpp"
#include "mrmc/planner.hpp"
#include "mrmc/priority.hpp"

namespace mrmc {

struct RobotSpec {
  int id = 0;
  int base_priority = 0;
  double radius = 0.2;
  Limits limits;
  RobotState start;
  Rect goal;
  double activation_time = 0.0;
};

enum class EmergencyBraking { MaxDecel, Immediate };

/// One robot: lifecycle (Inactive before its activation time, then Active
/// until the task is done, then Passive) and the Free/Busy/Emerg mode
/// machine. The simulator drives it phase by phase within a tick and hands it
/// only what its neighbors published.
class Agent {
 public:
  Agent(RobotSpec spec, const Workspace& ws, PlannerConfig config,
        EmergencyBraking braking = EmergencyBraking::MaxDecel);

  [[nodiscard]] int id() const { return spec_.id; }
  [[nodiscard]] const RobotSpec& spec() const { return spec_; }
  [[nodiscard]] Lifecycle lifecycle() const { return lifecycle_; }
  [[nodiscard]] Mode mode() const { return mode_; }
  [[nodiscard]] const RobotState& state() const { return state_; }
  [[nodiscard]] const MotionPlan& plan() const { return plan_; }
  [[nodiscard]] const std::optional<Vec2>& goal_point() const { return goal_point_; }
  [[nodiscard]] const PlannerConfig& config() const { return config_; }

  /// Inactive -> Active once t_c reaches the activation time. Computes the
  /// initial plan; when that fails the robot starts stopped in Emerg.
  /// Returns true if the robot became Active.
  bool activate(double t_c);

  /// Own horizon: trajectory segment up to leaving the sensing ball and its
  /// occupancy. Robots that are not Active hold their cells forever.
  [[nodiscard]] HorizonView publish(double t_c, double sensing_radius) const;

  /// Free robots check the neighbors' horizons; any conflict -> Busy.
  ConflictReport detect(const OccupancyMap& mine, const std::map<int, OccupancyMap>& neighbors);

  [[nodiscard]] PriorityContext context(int neighbor_count, double earliest_entry) const;

  /// Busy: fixed-path planning, then trajectory planning, then Emerg.
  CascadeResult replan(double t_c, const WindowMap& fixed_path_windows, const WindowMap& trajectory_windows);

  /// Emerg: leave once the trajectory planner finds a plan. Returns the result.
  PlanResult recover(double t_c, const WindowMap& trajectory_windows);

  /// Switches to the stopping plan and returns its first input.
  ControlInput emergency_stop(double t_c);

  /// Feed-forward input of the current plan at t_c.
  [[nodiscard]] ControlInput control(double t_c) const;

  /// Moves the state to the plan at t_c + dt.
  void advance(double t_c, double dt);

  /// At rest with the footprint inside the goal for a full tick -> Passive.
  bool settle(double t_c, double dt);

 private:
  RobotSpec spec_;
  const Workspace* ws_;
  PlannerConfig config_;
  EmergencyBraking braking_;
  Lifecycle lifecycle_ = Lifecycle::Inactive;
  Mode mode_ = Mode::Free;
  RobotState state_;
  MotionPlan plan_;
  std::optional<Vec2> goal_point_;
  std::optional<double> at_rest_since_;
};

}  // namespace mrmc
