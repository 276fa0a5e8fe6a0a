#include "asyncexec/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

// Relative slack for velocity checks; retimed segments sit exactly on the
// limit and the quotient may round above it.
constexpr double kSpeedSlack = 1e-9;

}  // namespace

const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Empty: return "Empty";
    case ViolationKind::GroupMismatch: return "GroupMismatch";
    case ViolationKind::NonZeroStart: return "NonZeroStart";
    case ViolationKind::NonMonotonicTime: return "NonMonotonicTime";
    case ViolationKind::DimensionMismatch: return "DimensionMismatch";
    case ViolationKind::JointLimit: return "JointLimit";
    case ViolationKind::VelocityLimit: return "VelocityLimit";
    case ViolationKind::MismatchedStart: return "MismatchedStart";
  }
  return "Unknown";
}

std::vector<Violation> validate(const JointTrajectory& traj, const RobotModel& model) {
  std::vector<Violation> out;
  if (traj.waypoints.empty()) {
    out.push_back({ViolationKind::Empty, 0, "trajectory has no waypoints"});
    return out;
  }
  if (traj.group_id != model.group_id())
    out.push_back({ViolationKind::GroupMismatch, 0,
                   fmt::format("trajectory group '{}' != model group '{}'", traj.group_id,
                               model.group_id())});
  if (traj.waypoints.front().time_from_start != 0.0)
    out.push_back({ViolationKind::NonZeroStart, 0, "first waypoint must be at t = 0"});

  const auto dof = static_cast<Eigen::Index>(model.dof());
  bool dims_ok = true;
  for (std::size_t i = 0; i < traj.waypoints.size(); ++i) {
    const Waypoint& wp = traj.waypoints[i];
    if (!std::isfinite(wp.time_from_start))
      out.push_back({ViolationKind::NonMonotonicTime, i, "non-finite time"});
    if (i > 0 && !(wp.time_from_start > traj.waypoints[i - 1].time_from_start))
      out.push_back({ViolationKind::NonMonotonicTime, i,
                     fmt::format("time {} does not exceed previous {}", wp.time_from_start,
                                 traj.waypoints[i - 1].time_from_start)});
    if (wp.positions.size() != dof ||
        (wp.velocities && wp.velocities->size() != dof)) {
      out.push_back({ViolationKind::DimensionMismatch, i,
                     fmt::format("expected {} joints, got {}", dof, wp.positions.size())});
      dims_ok = false;
      continue;
    }
    if (!within_limits(model, model.state(wp.positions)))
      out.push_back({ViolationKind::JointLimit, i, "waypoint outside joint limits"});
  }
  if (!dims_ok) return out;

  for (std::size_t i = 1; i < traj.waypoints.size(); ++i) {
    const double dt = traj.waypoints[i].time_from_start - traj.waypoints[i - 1].time_from_start;
    if (!(dt > 0.0)) continue;
    for (Eigen::Index j = 0; j < dof; ++j) {
      const double speed =
          std::abs(traj.waypoints[i].positions[j] - traj.waypoints[i - 1].positions[j]) / dt;
      const double limit = model.velocity_limits()[static_cast<std::size_t>(j)];
      if (speed > limit * (1.0 + kSpeedSlack)) {
        out.push_back({ViolationKind::VelocityLimit, i,
                       fmt::format("joint {} averages {} rad/s over limit {}", j, speed, limit)});
      }
    }
  }
  return out;
}

JointState state_at(const JointTrajectory& traj, double t) {
  if (t < 0.0 || std::isnan(t)) throw NegativeTime(fmt::format("state_at: t = {} < 0", t));
  if (traj.waypoints.empty()) throw ContractViolation("state_at on empty trajectory");
  const auto& wps = traj.waypoints;
  if (t >= wps.back().time_from_start) return JointState{traj.group_id, wps.back().positions};
  // First waypoint strictly later than t; t lies in [prev, next).
  const auto next = std::upper_bound(
      wps.begin(), wps.end(), t,
      [](double value, const Waypoint& wp) { return value < wp.time_from_start; });
  if (next == wps.begin()) return JointState{traj.group_id, wps.front().positions};
  const auto prev = std::prev(next);
  if (t == prev->time_from_start) return JointState{traj.group_id, prev->positions};
  const double s = (t - prev->time_from_start) / (next->time_from_start - prev->time_from_start);
  return JointState{traj.group_id, prev->positions + s * (next->positions - prev->positions)};
}

std::vector<double> sample_times(double dt, double horizon) {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw NonPositiveStep(fmt::format("discretization step must be > 0, got {}", dt));
  if (horizon < 0.0 || std::isnan(horizon))
    throw NegativeTime(fmt::format("horizon must be >= 0, got {}", horizon));
  std::vector<double> times;
  // Drop grid points within a hair of the horizon so the forced endpoint never
  // produces a near-duplicate sample.
  const double tol = 1e-9 * dt;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= horizon - tol) break;
    times.push_back(t);
  }
  times.push_back(horizon);
  return times;
}

std::vector<TimedState> discretize(const JointTrajectory& traj, double dt, double horizon) {
  const std::vector<double> times = sample_times(dt, horizon);
  std::vector<TimedState> out;
  out.reserve(times.size());
  for (double t : times) out.push_back({t, state_at(traj, t)});
  return out;
}

}  // namespace asyncexec
