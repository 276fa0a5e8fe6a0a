#include "asyncexec/collision.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

constexpr double kTimeEps = 1e-9;

std::vector<Aabb> boxes_of(std::span<const PlacedPrimitive> prims) {
  std::vector<Aabb> boxes;
  boxes.reserve(prims.size());
  for (const auto& p : prims) boxes.push_back(bounding_box(p));
  return boxes;
}

void fold(Clearance& best, const Clearance& c) {
  if (c.signed_distance < best.signed_distance) best = c;
}

// Running minimum over sampled states; remembers the earliest sample at or
// below the margin.
class SampleAccumulator {
 public:
  explicit SampleAccumulator(double margin) : margin_(margin) {}

  void add(double tau, const Clearance& c) {
    ++report_.states_evaluated;
    report_.min_clearance_seen = std::min(report_.min_clearance_seen, c.signed_distance);
    if (!report_.colliding() && c.signed_distance <= margin_) {
      report_.verdict = Verdict::Colliding;
      report_.first_collision_time = tau;
      report_.witness = c.witness;
    }
  }

  CollisionReport take() { return std::move(report_); }

 private:
  double margin_;
  CollisionReport report_;
};

}  // namespace

void Scene::add_robot(RobotModel model, Eigen::VectorXd idle_posture) {
  std::string group = model.group_id();
  JointState idle = model.state(std::move(idle_posture));
  robots.erase(group);
  robots.emplace(group, std::move(model));
  idle_postures[group] = std::move(idle);
}

void Scene::add_obstacle(Shape shape) {
  static_obstacles.push_back(
      {std::move(shape), Owner{kStaticGroup, static_cast<int>(static_obstacles.size())}});
}

const RobotModel& Scene::robot(const std::string& group_id) const {
  const auto it = robots.find(group_id);
  if (it == robots.end()) throw UnknownGroup(fmt::format("unknown group '{}'", group_id));
  return it->second;
}

void Scene::validate() const {
  for (const auto& [group, model] : robots) {
    const auto it = idle_postures.find(group);
    if (it == idle_postures.end())
      throw ScenarioInvalid(fmt::format("group '{}' has no idle posture", group));
    if (static_cast<std::size_t>(it->second.positions.size()) != model.dof())
      throw ScenarioInvalid(fmt::format("idle posture of '{}' has wrong dimension", group));
    if (!within_limits(model, it->second))
      throw ScenarioInvalid(fmt::format("idle posture of '{}' violates joint limits", group));
  }
  for (const auto& [group, posture] : idle_postures)
    if (!robots.count(group))
      throw ScenarioInvalid(fmt::format("idle posture for unknown group '{}'", group));
  for (const auto& obstacle : static_obstacles) {
    if (obstacle.owner.group != kStaticGroup)
      throw ScenarioInvalid("static obstacle owner must be tagged 'static'");
    if (!(obstacle.radius() > 0.0)) throw ScenarioInvalid("static obstacle radius must be > 0");
  }
}

void CheckParams::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw NonPositiveStep(fmt::format("check step must be > 0, got {}", dt));
  if (!(margin >= 0.0) || !std::isfinite(margin))
    throw ContractViolation(fmt::format("margin must be >= 0, got {}", margin));
}

double required_margin(const Scene& scene, double dt) {
  double fastest = 0.0;
  for (const auto& [group, model] : scene.robots)
    fastest = std::max(fastest, model.max_cartesian_speed_bound());
  return 2.0 * fastest * dt;
}

Clearance min_cross_clearance(std::span<const PlacedPrimitive> a,
                              std::span<const PlacedPrimitive> b) {
  const std::vector<Aabb> boxesA = boxes_of(a);
  const std::vector<Aabb> boxesB = boxes_of(b);
  Clearance best;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      // A pair whose box gap already reaches the best value cannot improve it.
      if (aabb_lower_bound(boxesA[i], boxesB[j]) >= best.signed_distance) continue;
      fold(best, primitive_clearance(a[i], b[j]));
    }
  return best;
}

namespace {

Clearance min_self_clearance(std::span<const PlacedPrimitive> prims, const RobotModel& model) {
  const std::vector<Aabb> boxes = boxes_of(prims);
  Clearance best;
  for (std::size_t i = 0; i < prims.size(); ++i)
    for (std::size_t j = i + 1; j < prims.size(); ++j) {
      if (model.is_allowed(i, j)) continue;
      if (aabb_lower_bound(boxes[i], boxes[j]) >= best.signed_distance) continue;
      fold(best, primitive_clearance(prims[i], prims[j]));
    }
  return best;
}

}  // namespace

Clearance state_pair_check(const RobotModel& modelA, const JointState& qA,
                           const RobotModel& modelB, const JointState& qB) {
  if (modelA.group_id() == modelB.group_id())
    throw ContractViolation(
        fmt::format("state_pair_check needs two different robots, got '{}' twice", modelA.group_id()));
  const auto primsA = forward_kinematics(modelA, qA);
  const auto primsB = forward_kinematics(modelB, qB);
  return min_cross_clearance(primsA, primsB);
}

CollisionReport trajectory_vs_running(const JointTrajectory& candidate,
                                      const RunningRecord& running, double now,
                                      const CheckParams& params, const Scene& scene) {
  params.validate();
  if (running.start_time < 0.0) throw ContractViolation("running start_time must be >= 0");
  if (running.start_time > now + kTimeEps)
    throw ContractViolation("running trajectory starts after the candidate");
  const RobotModel& candModel = scene.robot(candidate.group_id);
  const RobotModel& runModel = scene.robot(running.trajectory.group_id);
  if (candModel.group_id() == runModel.group_id())
    throw ContractViolation("candidate and running trajectory share a group");

  const double offset = std::max(0.0, now - running.start_time);
  const double horizon =
      std::max({candidate.duration(), running.trajectory.duration() - offset, 0.0});

  SampleAccumulator acc(params.margin);
  for (double tau : sample_times(params.dt, horizon)) {
    const auto primsC = forward_kinematics(candModel, state_at(candidate, tau));
    const auto primsR = forward_kinematics(runModel, state_at(running.trajectory, offset + tau));
    acc.add(tau, min_cross_clearance(primsC, primsR));
  }
  return acc.take();
}

CollisionReport trajectory_vs_static(const JointTrajectory& candidate, const Scene& scene,
                                     const std::set<std::string>& excluded_groups,
                                     const CheckParams& params) {
  params.validate();
  const RobotModel& candModel = scene.robot(candidate.group_id);

  std::vector<PlacedPrimitive> world(scene.static_obstacles.begin(), scene.static_obstacles.end());
  for (const auto& [group, model] : scene.robots) {
    if (group == candidate.group_id || excluded_groups.count(group)) continue;
    const auto idle = scene.idle_postures.find(group);
    if (idle == scene.idle_postures.end())
      throw MissingGroupState(fmt::format("no idle posture for group '{}'", group));
    const auto prims = forward_kinematics(model, idle->second);
    world.insert(world.end(), prims.begin(), prims.end());
  }

  SampleAccumulator acc(params.margin);
  for (double tau : sample_times(params.dt, candidate.duration())) {
    const auto primsC = forward_kinematics(candModel, state_at(candidate, tau));
    acc.add(tau, min_cross_clearance(primsC, world));
  }
  return acc.take();
}

CollisionReport composite_state_check(const std::map<std::string, JointState>& states,
                                      const Scene& scene, double margin) {
  std::vector<std::vector<PlacedPrimitive>> placed;
  std::vector<const RobotModel*> models;
  for (const auto& [group, model] : scene.robots) {
    const auto it = states.find(group);
    if (it == states.end())
      throw MissingGroupState(fmt::format("composite state lacks group '{}'", group));
    placed.push_back(forward_kinematics(model, it->second));
    models.push_back(&model);
  }

  Clearance best;
  for (std::size_t g = 0; g < placed.size(); ++g) {
    fold(best, min_self_clearance(placed[g], *models[g]));
    for (std::size_t h = g + 1; h < placed.size(); ++h)
      fold(best, min_cross_clearance(placed[g], placed[h]));
    fold(best, min_cross_clearance(placed[g], scene.static_obstacles));
  }

  CollisionReport report;
  report.states_evaluated = 1;
  report.min_clearance_seen = best.signed_distance;
  if (best.signed_distance <= margin) {
    report.verdict = Verdict::Colliding;
    report.first_collision_time = 0.0;
    report.witness = best.witness;
  }
  return report;
}

}  // namespace asyncexec
