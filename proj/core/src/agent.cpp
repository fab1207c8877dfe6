#include "mrmc/agent.hpp"

#include <cmath>

namespace mrmc {

Agent::Agent(RobotSpec spec, const Workspace& ws, PlannerConfig config, EmergencyBraking braking)
    : spec_(std::move(spec)), ws_(&ws), config_(std::move(config)), braking_(braking) {
  config_.radius = spec_.radius;
  state_ = spec_.start;
  state_.theta = normalize_angle(state_.theta);
  plan_ = stationary_plan(state_, 0.0, config_.lattice.dt);
  goal_point_ = mrmc::goal_point(*ws_, spec_.goal, spec_.radius);
}

bool Agent::activate(double t_c) {
  if (lifecycle_ != Lifecycle::Inactive || t_c < spec_.activation_time - 1e-9) return false;
  lifecycle_ = Lifecycle::Active;
  try {
    plan_ = initial_plan(*ws_, state_, spec_.goal, config_, t_c);
    mode_ = Mode::Free;
  } catch (const InfeasibleError&) {
    plan_ = stationary_plan(state_, t_c, config_.lattice.dt);
    mode_ = Mode::Emerg;
  }
  return true;
}

HorizonView Agent::publish(double t_c, double sensing_radius) const {
  if (lifecycle_ != Lifecycle::Active) {
    const MotionPlan still = stationary_plan(state_, t_c, config_.lattice.dt);
    return horizon_view(still.trajectory, t_c, sensing_radius, spec_.radius, ws_->grid());
  }
  return horizon_view(plan_.trajectory, t_c, sensing_radius, spec_.radius, ws_->grid());
}

ConflictReport Agent::detect(const OccupancyMap& mine, const std::map<int, OccupancyMap>& neighbors) {
  ConflictReport report;
  if (lifecycle_ != Lifecycle::Active || mode_ != Mode::Free) return report;
  report = detect_conflicts(mine, neighbors);
  if (report.any()) mode_ = Mode::Busy;
  return report;
}

PriorityContext Agent::context(int neighbor_count, double earliest_entry) const {
  return {spec_.id, neighbor_count, earliest_entry, spec_.base_priority, lifecycle_, mode_};
}

CascadeResult Agent::replan(double t_c, const WindowMap& fixed_path_windows, const WindowMap& trajectory_windows) {
  CascadeResult out;
  if (mode_ != Mode::Busy) return out;
  if (!goal_point_) {
    out.fixed_path_tried = true;
    out.result = fixed_path_plan(*ws_, branch_point(plan_, t_c), fixed_path_windows, config_);
    out.mode = out.result.feasible() ? Mode::Free : Mode::Emerg;
  } else {
    out = mrmc::plan(*ws_, plan_, t_c, *goal_point_, fixed_path_windows, trajectory_windows, config_);
  }
  if (out.result.plan) {
    plan_ = std::move(*out.result.plan);
    out.result.plan.reset();
    mode_ = Mode::Free;
  } else {
    emergency_stop(t_c);
  }
  return out;
}

PlanResult Agent::recover(double t_c, const WindowMap& trajectory_windows) {
  PlanResult out;
  if (mode_ != Mode::Emerg || !goal_point_) return out;
  out = trajectory_plan(*ws_, branch_point(plan_, t_c), *goal_point_, trajectory_windows, config_);
  if (out.plan) {
    plan_ = std::move(*out.plan);
    out.plan.reset();
    mode_ = Mode::Free;
  }
  return out;
}

ControlInput Agent::emergency_stop(double t_c) {
  mode_ = Mode::Emerg;
  if (braking_ == EmergencyBraking::Immediate) {
    RobotState frozen = plan_.trajectory.state_at(t_c);
    const ControlInput halt{-frozen.v / config_.lattice.dt, -frozen.omega / config_.lattice.dt};
    plan_ = halt_plan(frozen, t_c, config_.lattice.dt);
    return halt;
  }
  plan_ = brake_plan(plan_, t_c, config_.lattice);
  return control(t_c);
}

ControlInput Agent::control(double t_c) const {
  if (lifecycle_ != Lifecycle::Active) return {};
  const Trajectory& traj = plan_.trajectory;
  if (t_c >= traj.end_time() - 1e-9) return {};
  return traj.input(traj.index_at(t_c));
}

void Agent::advance(double t_c, double dt) {
  if (lifecycle_ != Lifecycle::Active) return;
  state_ = plan_.trajectory.state_at(t_c + dt);
}

bool Agent::settle(double t_c, double dt) {
  if (lifecycle_ != Lifecycle::Active || mode_ != Mode::Free) {
    at_rest_since_.reset();
    return false;
  }
  const bool resting = state_.v == 0.0 && state_.omega == 0.0 && t_c >= plan_.arrival_time() - 1e-9 &&
                       footprint_inside(spec_.goal, state_.position(), spec_.radius);
  if (!resting) {
    at_rest_since_.reset();
    return false;
  }
  if (!at_rest_since_) at_rest_since_ = t_c;
  if (t_c - *at_rest_since_ >= dt - 1e-9) {
    lifecycle_ = Lifecycle::Passive;
    return true;
  }
  return false;
}

}  // namespace mrmc
