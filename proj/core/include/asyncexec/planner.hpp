#pragma once

#include <string>

#include "asyncexec/kinematics.hpp"
#include "asyncexec/trajectory.hpp"

namespace asyncexec {

/// Straight joint-space segment from start to goal at the fastest uniform
/// speed the velocity limits allow: the binding joint moves at its limit and
/// every other joint is scaled to arrive at the same time. Identical start
/// and goal give a single-waypoint, zero-duration trajectory.
/// Throws LimitViolation when either endpoint is outside the joint limits.
JointTrajectory plan_joint_line(const RobotModel& model, const JointState& start,
                                const JointState& goal, std::string trajectory_id = "");

}  // namespace asyncexec
