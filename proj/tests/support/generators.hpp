#pragma once

// Seeded scenario and primitive generators shared by the unit and
// acceptance suites.

#include <cstdint>
#include <random>
#include <string>

#include "asyncexec/collision.hpp"
#include "asyncexec/scenario.hpp"

namespace asyncexec::testing {

std::string fixture_path(const std::string& name);

/// Two-link planar arm at (x, y) with heading `yaw`, links along local x.
RobotModel planar_arm(const std::string& group, double x, double y, double yaw = 0.0,
                      double l1 = 1.0, double l2 = 1.0, double radius = 0.05,
                      double velocity_limit = 1.0, double joint_range = 3.2);

PlacedPrimitive random_primitive(std::mt19937_64& rng, Owner owner);

/// Piecewise-linear trajectory with `waypoints` random within-limit states,
/// each segment timed at the velocity limits scaled by a random slack.
JointTrajectory random_trajectory(const RobotModel& model, std::mt19937_64& rng,
                                  int waypoints, const std::string& id);

/// Two facing planar arms, a running trajectory that started `offset`
/// seconds ago and a candidate, both sweeping through the shared region.
struct CrossingCase {
  Scene scene;
  JointTrajectory candidate;
  RunningRecord running;
  double now = 0.0;
  CheckParams params;
};
CrossingCase random_crossing_case(std::uint64_t seed);

/// Two or three planar arms around a shared centre with several randomly
/// timed tasks each. Margin is set to satisfy the sampling soundness bound.
Scenario random_planar_scenario(std::uint64_t seed);

}  // namespace asyncexec::testing
