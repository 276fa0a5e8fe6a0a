#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "asyncexec/geometry.hpp"
#include "asyncexec/kinematics.hpp"
#include "asyncexec/trajectory.hpp"

namespace asyncexec {

/// World model used for checking: robot groups with their idle postures and
/// static obstacles (owner group "static").
struct Scene {
  std::map<std::string, RobotModel> robots;
  std::map<std::string, JointState> idle_postures;
  std::vector<PlacedPrimitive> static_obstacles;

  void add_robot(RobotModel model, Eigen::VectorXd idle_posture);
  void add_obstacle(Shape shape);
  const RobotModel& robot(const std::string& group_id) const;
  /// Throws ScenarioInvalid if postures and models disagree.
  void validate() const;
};

struct RunningRecord {
  JointTrajectory trajectory;
  double start_time = 0.0;
};

enum class Verdict { Clear, Colliding };

struct CollisionReport {
  Verdict verdict = Verdict::Clear;
  // Relative to the candidate's start; set iff Colliding.
  std::optional<double> first_collision_time;
  std::optional<WitnessPair> witness;
  double min_clearance_seen = std::numeric_limits<double>::infinity();
  std::size_t states_evaluated = 0;

  bool colliding() const { return verdict == Verdict::Colliding; }
};

struct CheckParams {
  double dt = 0.05;
  double margin = 0.02;

  void validate() const;
};

/// Margin that makes dt-sampled checking sound for a scene: 2 x (fastest
/// point speed bound over all robots) x dt. Between two samples no pair of
/// bodies can close more than margin / 2.
double required_margin(const Scene& scene, double dt);

/// Minimum clearance over all cross pairs of two primitive sets, with the
/// witness of the first minimal pair in (i, j) order. Pairs whose boxes
/// already prove a larger distance are skipped.
Clearance min_cross_clearance(std::span<const PlacedPrimitive> a,
                              std::span<const PlacedPrimitive> b);

/// Minimum clearance between the primitives of two different robots.
/// Allowed pairs never apply across robots. Throws ContractViolation when
/// both states belong to the same group.
Clearance state_pair_check(const RobotModel& modelA, const JointState& qA,
                           const RobotModel& modelB, const JointState& qB);

/// Candidate starting at absolute time `now` against a running trajectory.
/// Both are sampled at shared timestamps now + tau, tau on the dt grid, over
/// the longer of the candidate's duration and the running trajectory's
/// remaining time; each arm holds its final waypoint after its own end.
CollisionReport trajectory_vs_running(const JointTrajectory& candidate,
                                      const RunningRecord& running, double now,
                                      const CheckParams& params, const Scene& scene);

/// Candidate against static obstacles and the idle postures of every group
/// not in `excluded_groups` (the candidate's own group is always excluded).
CollisionReport trajectory_vs_static(const JointTrajectory& candidate, const Scene& scene,
                                     const std::set<std::string>& excluded_groups,
                                     const CheckParams& params);

/// One check of the union of all groups' primitives: within-robot pairs not
/// in the allowed set, all cross-robot pairs and all robot-static pairs.
/// Throws MissingGroupState when a scene robot has no entry in `states`.
CollisionReport composite_state_check(const std::map<std::string, JointState>& states,
                                      const Scene& scene, double margin);

}  // namespace asyncexec
