#include "asyncexec/planner.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

JointTrajectory plan_joint_line(const RobotModel& model, const JointState& start,
                                const JointState& goal, std::string trajectory_id) {
  if (!within_limits(model, start))
    throw LimitViolation(fmt::format("start state of '{}' outside joint limits", model.group_id()));
  if (!within_limits(model, goal))
    throw LimitViolation(fmt::format("goal state of '{}' outside joint limits", model.group_id()));

  JointTrajectory traj;
  traj.id = std::move(trajectory_id);
  traj.group_id = model.group_id();

  double duration = 0.0;
  for (std::size_t j = 0; j < model.dof(); ++j) {
    const auto k = static_cast<Eigen::Index>(j);
    duration = std::max(duration,
                        std::abs(goal.positions[k] - start.positions[k]) / model.velocity_limits()[j]);
  }

  traj.waypoints.push_back({0.0, start.positions, std::nullopt});
  if (duration > 0.0) {
    const Eigen::VectorXd speed = (goal.positions - start.positions) / duration;
    traj.waypoints.front().velocities = speed;
    traj.waypoints.push_back({duration, goal.positions, speed});
  }
  return traj;
}

}  // namespace asyncexec
