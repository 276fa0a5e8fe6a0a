#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "asyncexec/geometry.hpp"

namespace asyncexec {

using Transform = Eigen::Isometry3d;

/// Builds a rigid transform from a translation and roll/pitch/yaw angles
/// (extrinsic x-y-z, i.e. R = Rz(yaw) * Ry(pitch) * Rx(roll)).
Transform make_transform(const Vec3& xyz, const Vec3& rpy = Vec3::Zero());

/// Revolute joint: fixed offset from the parent frame followed by a rotation
/// about `axis` (expressed in the offset frame).
struct JointSpec {
  Vec3 axis = Vec3::UnitZ();
  Transform origin = Transform::Identity();
  double lower = 0.0;
  double upper = 0.0;
};

/// Collision primitive rigidly attached to the frame of joint `frame`,
/// coordinates given in that frame.
struct LinkGeometry {
  std::size_t frame = 0;
  Shape shape;
};

struct JointState {
  std::string group_id;
  Eigen::VectorXd positions;
};

using LinkPair = std::pair<std::size_t, std::size_t>;

/// Serial revolute chain with capsule/sphere links. Immutable once built; the
/// constructor enforces the model invariants and adds every adjacent-link
/// pair (links on the same or neighbouring frames) to the allowed set.
class RobotModel {
 public:
  RobotModel(std::string group_id, Transform base_pose, std::vector<JointSpec> joints,
             std::vector<double> velocity_limits, std::vector<LinkGeometry> links,
             const std::vector<LinkPair>& extra_allowed_pairs = {});

  const std::string& group_id() const { return group_id_; }
  const Transform& base_pose() const { return base_pose_; }
  const std::vector<JointSpec>& joints() const { return joints_; }
  const std::vector<double>& velocity_limits() const { return velocity_limits_; }
  const std::vector<LinkGeometry>& links() const { return links_; }
  const std::set<LinkPair>& allowed_pairs() const { return allowed_pairs_; }
  std::size_t dof() const { return joints_.size(); }

  bool is_allowed(std::size_t link_a, std::size_t link_b) const;

  /// Upper bound on the speed of any primitive segment point for motions that
  /// respect the velocity limits: sum over joints of (reach beyond the joint
  /// origin) x (joint speed limit).
  double max_cartesian_speed_bound() const { return speed_bound_; }

  JointState state(Eigen::VectorXd positions) const {
    return JointState{group_id_, std::move(positions)};
  }

 private:
  std::string group_id_;
  Transform base_pose_;
  std::vector<JointSpec> joints_;
  std::vector<double> velocity_limits_;
  std::vector<LinkGeometry> links_;
  std::set<LinkPair> allowed_pairs_;
  double speed_bound_ = 0.0;
};

/// World frame of every joint (after its rotation) for configuration q.
std::vector<Transform> joint_frames(const RobotModel& model, const JointState& q);

/// World placement of every link primitive, in link order. Owner tags are
/// (group_id, link index).
std::vector<PlacedPrimitive> forward_kinematics(const RobotModel& model, const JointState& q);

/// True iff every coordinate lies in its closed [lower, upper] interval.
bool within_limits(const RobotModel& model, const JointState& q);

/// Planar arm in the base xy-plane: every joint rotates about z and each link
/// is a capsule of the given length along the local x axis.
RobotModel make_planar_arm(std::string group_id, const Transform& base,
                           const std::vector<double>& link_lengths, double radius,
                           double velocity_limit, double joint_range);

}  // namespace asyncexec
