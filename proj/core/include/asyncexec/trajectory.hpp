#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "asyncexec/kinematics.hpp"

namespace asyncexec {

struct Waypoint {
  double time_from_start = 0.0;
  Eigen::VectorXd positions;
  // Carried for consumers; interpolation is piecewise linear and ignores them.
  std::optional<Eigen::VectorXd> velocities;
};

struct JointTrajectory {
  std::string id;
  std::string group_id;
  std::vector<Waypoint> waypoints;

  double duration() const { return waypoints.empty() ? 0.0 : waypoints.back().time_from_start; }
  const Eigen::VectorXd& start_positions() const { return waypoints.front().positions; }
  const Eigen::VectorXd& final_positions() const { return waypoints.back().positions; }
};

struct TimedState {
  double time = 0.0;
  JointState state;
};

enum class ViolationKind {
  Empty,
  GroupMismatch,
  NonZeroStart,
  NonMonotonicTime,
  DimensionMismatch,
  JointLimit,
  VelocityLimit,
  MismatchedStart,
};

const char* to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t waypoint = 0;
  std::string message;
};

/// Checks the trajectory against its model: times start at 0 and strictly
/// increase, dimensions match, every waypoint is within joint limits and the
/// average joint speed over each segment respects the velocity limits.
/// Returns an empty list when the trajectory is valid.
std::vector<Violation> validate(const JointTrajectory& traj, const RobotModel& model);

/// Piecewise-linear state at time t. Past the end the final waypoint is held.
/// Throws NegativeTime for t < 0.
JointState state_at(const JointTrajectory& traj, double t);

/// Sample times 0, dt, 2 dt, ... below `horizon`, then `horizon` itself.
/// Throws NonPositiveStep for dt <= 0.
std::vector<double> sample_times(double dt, double horizon);

std::vector<TimedState> discretize(const JointTrajectory& traj, double dt, double horizon);

}  // namespace asyncexec
