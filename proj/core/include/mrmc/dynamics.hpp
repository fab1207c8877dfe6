#pragma once

#include <cstddef>
#include <vector>

#include "mrmc/geometry.hpp"

namespace mrmc {

/// Second-order unicycle state (x, y, theta, v, omega).
struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double v = 0.0;
  double omega = 0.0;

  [[nodiscard]] Vec2 position() const { return {x, y}; }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

/// Normalized force and torque inputs (accelerations).
struct ControlInput {
  double F = 0.0;
  double tau = 0.0;
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct Limits {
  double v_max = 1.0;
  double omega_max = 1.0;
  double F_max = 1.0;
  double tau_max = 1.0;

  [[nodiscard]] bool valid() const {
    return v_max > 0.0 && omega_max > 0.0 && F_max > 0.0 && tau_max > 0.0;
  }
};

/// One classical RK4 step of the unicycle ODE with the input held constant.
RobotState integrate_step(const RobotState& state, const ControlInput& input, double dt);

/// Box constraints on velocities and inputs, boundaries included.
bool check_limits(const RobotState& state, const ControlInput& input, const Limits& limits);

/// Uniformly sampled state curve. inputs[k] is applied on [t_k, t_k + dt);
/// the last input is zero. Between samples positions interpolate linearly and
/// v, omega are held; past the end the final pose is held at rest.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double t0, double dt);
  Trajectory(double t0, double dt, std::vector<RobotState> states, std::vector<ControlInput> inputs);

  [[nodiscard]] double start_time() const { return t0_; }
  [[nodiscard]] double dt() const { return dt_; }
  [[nodiscard]] double end_time() const;
  [[nodiscard]] std::size_t size() const { return states_.size(); }
  [[nodiscard]] bool empty() const { return states_.empty(); }
  [[nodiscard]] double time(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }

  [[nodiscard]] const std::vector<RobotState>& states() const { return states_; }
  [[nodiscard]] const std::vector<ControlInput>& inputs() const { return inputs_; }
  [[nodiscard]] const RobotState& state(std::size_t k) const { return states_[k]; }
  [[nodiscard]] const ControlInput& input(std::size_t k) const { return inputs_[k]; }
  [[nodiscard]] const RobotState& back() const { return states_.back(); }

  void push_back(const RobotState& s, const ControlInput& applied_before = {});

  /// Sample index nearest to t, clamped to the stored range.
  [[nodiscard]] std::size_t index_at(double t) const;
  [[nodiscard]] RobotState state_at(double t) const;
  [[nodiscard]] Vec2 position_at(double t) const;

  /// Samples with index >= first, re-timed from that sample.
  [[nodiscard]] Trajectory tail(std::size_t first) const;

 private:
  double t0_ = 0.0;
  double dt_ = 0.05;
  std::vector<RobotState> states_;
  std::vector<ControlInput> inputs_;
};

/// Time-stamped positions; the projection of a Trajectory.
struct PositionTrajectory {
  double t0 = 0.0;
  double dt = 0.05;
  std::vector<Vec2> points;

  [[nodiscard]] bool empty() const { return points.empty(); }
  [[nodiscard]] std::size_t size() const { return points.size(); }
  [[nodiscard]] double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  [[nodiscard]] double end_time() const;
  [[nodiscard]] Vec2 at(double t) const;
};

PositionTrajectory project_position(const Trajectory& trajectory);

/// Smallest sample time t > t_c with |p(t) - center| > radius, or the end
/// of the trajectory when it never leaves the ball.
/// Throws std::invalid_argument if t_c lies outside the trajectory.
double first_leave_time(const Trajectory& trajectory, Vec2 center, double radius, double t_c);
double first_leave_time(const PositionTrajectory& trajectory, Vec2 center, double radius, double t_c);

}  // namespace mrmc
