#include "asyncexec/kinematics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

// Slack on joint limits for FK inputs: linear interpolation between two legal
// waypoints may land an ulp outside the interval.
constexpr double kLimitSlack = 1e-9;

void check_dimension(const RobotModel& model, const JointState& q) {
  if (static_cast<std::size_t>(q.positions.size()) != model.dof())
    throw DimensionMismatch(fmt::format("group '{}' expects {} joints, got {}",
                                        model.group_id(), model.dof(), q.positions.size()));
}

Vec3 to_frame(const Transform& frame, const Vec3& local) { return frame * local; }

double max_local_extent(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Sphere>)
          return s.center.norm();
        else
          return std::max(s.p0.norm(), s.p1.norm());
      },
      shape);
}

}  // namespace

Transform make_transform(const Vec3& xyz, const Vec3& rpy) {
  Transform t = Transform::Identity();
  t.translation() = xyz;
  t.linear() = (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) *
                Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
                Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
                   .toRotationMatrix();
  return t;
}

RobotModel::RobotModel(std::string group_id, Transform base_pose, std::vector<JointSpec> joints,
                       std::vector<double> velocity_limits, std::vector<LinkGeometry> links,
                       const std::vector<LinkPair>& extra_allowed_pairs)
    : group_id_(std::move(group_id)),
      base_pose_(base_pose),
      joints_(std::move(joints)),
      velocity_limits_(std::move(velocity_limits)),
      links_(std::move(links)) {
  if (group_id_.empty() || group_id_ == kStaticGroup)
    throw ModelInvalid(fmt::format("invalid group id '{}'", group_id_));
  if (joints_.empty()) throw ModelInvalid(fmt::format("group '{}' has no joints", group_id_));
  if (joints_.size() != velocity_limits_.size())
    throw ModelInvalid(fmt::format("group '{}': {} joints but {} velocity limits", group_id_,
                                   joints_.size(), velocity_limits_.size()));
  for (std::size_t j = 0; j < joints_.size(); ++j) {
    const JointSpec& js = joints_[j];
    if (std::abs(js.axis.norm() - 1.0) > 1e-9)
      throw ModelInvalid(fmt::format("group '{}' joint {}: axis is not unit length", group_id_, j));
    if (!(js.lower <= js.upper))
      throw ModelInvalid(fmt::format("group '{}' joint {}: lower > upper", group_id_, j));
    if (!(velocity_limits_[j] > 0.0) || !std::isfinite(velocity_limits_[j]))
      throw ModelInvalid(fmt::format("group '{}' joint {}: velocity limit must be > 0", group_id_, j));
  }
  for (std::size_t l = 0; l < links_.size(); ++l) {
    if (links_[l].frame >= joints_.size())
      throw ModelInvalid(fmt::format("group '{}' link {}: frame {} out of range", group_id_, l,
                                     links_[l].frame));
    const double r = std::visit([](const auto& s) { return s.radius; }, links_[l].shape);
    if (!(r > 0.0)) throw ModelInvalid(fmt::format("group '{}' link {}: radius must be > 0", group_id_, l));
  }

  for (std::size_t a = 0; a < links_.size(); ++a)
    for (std::size_t b = a + 1; b < links_.size(); ++b) {
      const auto fa = links_[a].frame;
      const auto fb = links_[b].frame;
      if ((fa > fb ? fa - fb : fb - fa) <= 1) allowed_pairs_.emplace(a, b);
    }
  for (auto [a, b] : extra_allowed_pairs) {
    if (a >= links_.size() || b >= links_.size() || a == b)
      throw ModelInvalid(fmt::format("group '{}': bad allowed pair ({}, {})", group_id_, a, b));
    allowed_pairs_.emplace(std::min(a, b), std::max(a, b));
  }

  // Reach of joint j: farthest any primitive point can be from joint j's
  // origin, bounded by the chain of offset lengths plus the local extent.
  const std::size_t n = joints_.size();
  std::vector<double> link_extent(n, 0.0);
  for (const auto& link : links_)
    link_extent[link.frame] = std::max(link_extent[link.frame], max_local_extent(link.shape));
  for (std::size_t j = 0; j < n; ++j) {
    double reach = 0.0;
    double chain = 0.0;
    for (std::size_t f = j; f < n; ++f) {
      if (f > j) chain += joints_[f].origin.translation().norm();
      reach = std::max(reach, chain + link_extent[f]);
    }
    speed_bound_ += reach * velocity_limits_[j];
  }
}

bool RobotModel::is_allowed(std::size_t link_a, std::size_t link_b) const {
  return allowed_pairs_.count({std::min(link_a, link_b), std::max(link_a, link_b)}) > 0;
}

std::vector<Transform> joint_frames(const RobotModel& model, const JointState& q) {
  check_dimension(model, q);
  if (!model.group_id().empty() && !q.group_id.empty() && q.group_id != model.group_id())
    throw ContractViolation(fmt::format("state for group '{}' passed to model '{}'", q.group_id,
                                        model.group_id()));
  std::vector<Transform> frames;
  frames.reserve(model.dof());
  Transform current = model.base_pose();
  for (std::size_t j = 0; j < model.dof(); ++j) {
    const JointSpec& js = model.joints()[j];
    const double angle = q.positions[static_cast<Eigen::Index>(j)];
    if (!std::isfinite(angle))
      throw JointLimitViolation(fmt::format("group '{}' joint {} is not finite", model.group_id(), j));
    if (angle < js.lower - kLimitSlack || angle > js.upper + kLimitSlack)
      throw JointLimitViolation(fmt::format("group '{}' joint {} = {} outside [{}, {}]",
                                            model.group_id(), j, angle, js.lower, js.upper));
    current = current * js.origin * Eigen::AngleAxisd(angle, js.axis);
    frames.push_back(current);
  }
  return frames;
}

std::vector<PlacedPrimitive> forward_kinematics(const RobotModel& model, const JointState& q) {
  const std::vector<Transform> frames = joint_frames(model, q);
  std::vector<PlacedPrimitive> placed;
  placed.reserve(model.links().size());
  for (std::size_t l = 0; l < model.links().size(); ++l) {
    const LinkGeometry& link = model.links()[l];
    const Transform& frame = frames[link.frame];
    Owner owner{model.group_id(), static_cast<int>(l)};
    std::visit(
        [&](const auto& s) {
          if constexpr (std::is_same_v<std::decay_t<decltype(s)>, Sphere>)
            placed.push_back({Sphere{to_frame(frame, s.center), s.radius}, std::move(owner)});
          else
            placed.push_back(
                {Capsule{to_frame(frame, s.p0), to_frame(frame, s.p1), s.radius}, std::move(owner)});
        },
        link.shape);
  }
  return placed;
}

bool within_limits(const RobotModel& model, const JointState& q) {
  check_dimension(model, q);
  for (std::size_t j = 0; j < model.dof(); ++j) {
    const double v = q.positions[static_cast<Eigen::Index>(j)];
    if (!(v >= model.joints()[j].lower && v <= model.joints()[j].upper)) return false;
  }
  return true;
}

RobotModel make_planar_arm(std::string group_id, const Transform& base,
                           const std::vector<double>& link_lengths, double radius,
                           double velocity_limit, double joint_range) {
  std::vector<JointSpec> joints;
  std::vector<LinkGeometry> links;
  for (std::size_t i = 0; i < link_lengths.size(); ++i) {
    JointSpec js;
    js.axis = Vec3::UnitZ();
    js.origin = make_transform(i == 0 ? Vec3::Zero() : Vec3(link_lengths[i - 1], 0, 0));
    js.lower = -joint_range;
    js.upper = joint_range;
    joints.push_back(js);
    links.push_back({i, Capsule{Vec3::Zero(), Vec3(link_lengths[i], 0, 0), radius}});
  }
  std::vector<double> limits(link_lengths.size(), velocity_limit);
  return RobotModel(std::move(group_id), base, std::move(joints), std::move(limits),
                    std::move(links));
}

}  // namespace asyncexec
