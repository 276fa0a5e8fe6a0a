#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "asyncexec/collision.hpp"
#include "asyncexec/errors.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace asyncexec {
namespace {

using std::numbers::pi;
using testing::brute_min_clearance;
using testing::dense_pair_scan;
using testing::planar_arm;
using testing::random_crossing_case;

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

JointTrajectory line(const std::string& id, const std::string& group, Eigen::VectorXd a,
                     Eigen::VectorXd b, double duration) {
  return JointTrajectory{id, group, {{0.0, std::move(a), {}}, {duration, std::move(b), {}}}};
}

std::set<Owner> as_set(const WitnessPair& w) { return {w.first, w.second}; }

double horizon_of(const testing::CrossingCase& c) {
  return std::max(c.candidate.duration(),
                  c.running.trajectory.duration() - (c.now - c.running.start_time));
}

TEST(StatePairCheck, FarApartArmsAreClear) {
  const auto a = planar_arm("a", 0, 0);
  const auto b = planar_arm("b", 10, 0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.2, 3.2);
  for (int i = 0; i < 200; ++i) {
    const auto c = state_pair_check(a, a.state(vec({u(rng), u(rng)})), b, b.state(vec({u(rng), u(rng)})));
    // 10 m apart, 2 m reach each, 0.05 m radius each.
    EXPECT_GE(c.signed_distance, 10.0 - 4.0 - 0.1 - 1e-12);
  }
}

TEST(StatePairCheck, FacingArmsOverlapMatchesOracle) {
  const auto a = planar_arm("a", 0, 0);
  const auto b = planar_arm("b", 1, 0, pi);
  const auto qa = a.state(vec({0, 0}));
  const auto qb = b.state(vec({0, 0}));
  const auto c = state_pair_check(a, qa, b, qb);
  const auto oracle = brute_min_clearance(forward_kinematics(a, qa), forward_kinematics(b, qb));
  EXPECT_LT(c.signed_distance, 0.0);
  EXPECT_DOUBLE_EQ(c.signed_distance, oracle.signed_distance);
  EXPECT_EQ(c.witness.first.group, "a");
  EXPECT_EQ(c.witness.second.group, "b");
}

TEST(StatePairCheck, SameRobotIsRejected) {
  const auto a = planar_arm("a", 0, 0);
  EXPECT_THROW(state_pair_check(a, a.state(vec({0, 0})), a, a.state(vec({1, 0}))), ContractViolation);
}

TEST(StatePairCheck, RejectsWrongDimension) {
  const auto a = planar_arm("a", 0, 0);
  const auto b = planar_arm("b", 1, 0);
  EXPECT_THROW(state_pair_check(a, a.state(vec({0})), b, b.state(vec({0, 0}))), DimensionMismatch);
}

TEST(MinCrossClearance, PruningMatchesExhaustiveSearch) {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 300; ++round) {
    std::vector<PlacedPrimitive> a, b;
    const int n = 1 + round % 12;
    for (int i = 0; i < n; ++i) {
      a.push_back(testing::random_primitive(rng, {"a", i}));
      b.push_back(testing::random_primitive(rng, {"b", i}));
    }
    const auto fast = min_cross_clearance(a, b);
    const auto slow = brute_min_clearance(a, b);
    ASSERT_EQ(fast.signed_distance, slow.signed_distance);
    EXPECT_EQ(fast.witness, slow.witness);
  }
}

TEST(CheckParams, Validation) {
  EXPECT_THROW((CheckParams{0.0, 0.1}.validate()), NonPositiveStep);
  EXPECT_THROW((CheckParams{0.1, -0.1}.validate()), ContractViolation);
  EXPECT_NO_THROW((CheckParams{0.1, 0.0}.validate()));
}

TEST(RequiredMargin, UsesFastestRobot) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0, 0, 1, 1, 0.05, 1.0), vec({0, 0}));
  scene.add_robot(planar_arm("b", 5, 0, 0, 1, 1, 0.05, 0.5), vec({0, 0}));
  // Speed bounds: a = 2*1 + 1*1 = 3, b = 1.5.
  EXPECT_NEAR(required_margin(scene, 0.01), 0.06, 1e-15);
}

TEST(TrajectoryVsRunning, DisjointWorkspacesAreClear) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({0, 0}));
  scene.add_robot(planar_arm("b", 5, 0), vec({0, 0}));
  const auto cand = line("c", "a", vec({0, 0}), vec({2, 0}), 2.0);
  const RunningRecord run{line("r", "b", vec({0, 0}), vec({3, 0}), 3.0), 0.0};
  const auto rep = trajectory_vs_running(cand, run, 0.5, CheckParams{0.01, 0.05}, scene);
  EXPECT_FALSE(rep.colliding());
  EXPECT_FALSE(rep.first_collision_time.has_value());
  EXPECT_GE(rep.min_clearance_seen, 0.9);
  EXPECT_GT(rep.states_evaluated, 0u);
}

TEST(TrajectoryVsRunning, CrossingMatchesDenseOracle) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const auto c = random_crossing_case(seed);
    const auto rep = trajectory_vs_running(c.candidate, c.running, c.now, c.params, c.scene);
    const auto dense = dense_pair_scan(c.candidate, c.scene.robot(c.candidate.group_id),
                                       c.running.trajectory, c.scene.robot(c.running.trajectory.group_id),
                                       c.now - c.running.start_time, horizon_of(c), c.params.dt / 100,
                                       c.params.margin);
    if (dense.first_contact) ASSERT_TRUE(rep.colliding()) << "missed contact, seed " << seed;
    if (rep.colliding()) {
      ASSERT_TRUE(dense.first_margin_hit.has_value()) << seed;
      EXPECT_NEAR(*rep.first_collision_time, *dense.first_margin_hit, c.params.dt) << seed;
      EXPECT_LE(*rep.first_collision_time, horizon_of(c) + 1e-12);
    }
    EXPECT_GE(rep.min_clearance_seen, dense.min_clearance - 1e-9);
  }
}

TEST(TrajectoryVsRunning, FinishedRunningArmHoldsFinalPosture) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({1.5, 0}));
  scene.add_robot(planar_arm("b", 1.5, 0, pi), vec({1.0, 0}));
  // b ends pointing straight at a's base and stays there.
  const RunningRecord run{line("r", "b", vec({1.0, 0}), vec({0, 0}), 1.0), 0.0};
  const auto cand = line("c", "a", vec({1.5, 0}), vec({-1.5, 0}), 3.0);
  const CheckParams params{0.01, 0.05};
  const auto rep = trajectory_vs_running(cand, run, 5.0, params, scene);
  ASSERT_TRUE(rep.colliding());

  Scene parked = scene;
  parked.idle_postures["b"] = parked.robot("b").state(vec({0, 0}));
  const auto stat = trajectory_vs_static(cand, parked, {}, params);
  ASSERT_TRUE(stat.colliding());
  EXPECT_EQ(*rep.first_collision_time, *stat.first_collision_time);
  EXPECT_EQ(rep.min_clearance_seen, stat.min_clearance_seen);
}

TEST(TrajectoryVsRunning, HorizonCoversLongerRunningTrajectory) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({1.5, 0}));
  scene.add_robot(planar_arm("b", 2.5, 0, pi), vec({-1.5, 0}));
  // A zero-length candidate parks a on the x axis; b only sweeps into it late.
  const JointTrajectory cand{"c", "a", {{0.0, vec({0, 0}), {}}}};
  const RunningRecord run{line("r", "b", vec({-1.5, 0}), vec({1.5, 0}), 3.0), 0.0};
  const auto rep = trajectory_vs_running(cand, run, 0.0, CheckParams{0.01, 0.05}, scene);
  ASSERT_TRUE(rep.colliding());
  EXPECT_GT(*rep.first_collision_time, 0.5);
}

TEST(TrajectoryVsRunning, SwappingRolesAgrees) {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    auto c = random_crossing_case(seed);
    const RunningRecord a_running{c.candidate, c.now};
    const RunningRecord b_running{c.running.trajectory, c.now};
    const auto ab = trajectory_vs_running(c.candidate, b_running, c.now, c.params, c.scene);
    const auto ba = trajectory_vs_running(c.running.trajectory, a_running, c.now, c.params, c.scene);
    ASSERT_EQ(ab.verdict, ba.verdict) << seed;
    EXPECT_EQ(ab.first_collision_time, ba.first_collision_time) << seed;
    EXPECT_EQ(ab.min_clearance_seen, ba.min_clearance_seen) << seed;
    if (ab.colliding()) EXPECT_EQ(as_set(*ab.witness), as_set(*ba.witness));
  }
}

TEST(TrajectoryVsRunning, MonotoneInMargin) {
  for (std::uint64_t seed = 200; seed < 220; ++seed) {
    const auto c = random_crossing_case(seed);
    std::optional<double> previous;
    bool was_colliding = false;
    for (double scale : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      CheckParams p = c.params;
      p.margin = c.params.margin * scale;
      const auto rep = trajectory_vs_running(c.candidate, c.running, c.now, p, c.scene);
      if (was_colliding) {
        ASSERT_TRUE(rep.colliding()) << seed;
        EXPECT_LE(*rep.first_collision_time, *previous);
      }
      was_colliding = rep.colliding();
      previous = rep.first_collision_time;
    }
  }
}

TEST(TrajectoryVsRunning, FinerStepNeverSeesLessApproach) {
  for (std::uint64_t seed = 300; seed < 315; ++seed) {
    const auto c = random_crossing_case(seed);
    for (int k : {2, 3, 5}) {
      CheckParams fine = c.params;
      fine.dt = c.params.dt / k;
      const auto coarse = trajectory_vs_running(c.candidate, c.running, c.now, c.params, c.scene);
      const auto dense = trajectory_vs_running(c.candidate, c.running, c.now, fine, c.scene);
      EXPECT_GE(coarse.min_clearance_seen, dense.min_clearance_seen - 1e-12) << seed << " k=" << k;
    }
  }
}

TEST(TrajectoryVsRunning, RejectsBadInputs) {
  const auto c = random_crossing_case(1);
  EXPECT_THROW(trajectory_vs_running(c.candidate, c.running, c.now, CheckParams{0.0, 0.1}, c.scene),
               NonPositiveStep);
  const RunningRecord future{c.running.trajectory, c.now + 1.0};
  EXPECT_THROW(trajectory_vs_running(c.candidate, future, c.now, c.params, c.scene), ContractViolation);
}

TEST(TrajectoryVsStatic, EmptySceneIsClear) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({0, 0}));
  const auto rep = trajectory_vs_static(line("c", "a", vec({0, 0}), vec({3, 1}), 3.0), scene, {},
                                        CheckParams{});
  EXPECT_FALSE(rep.colliding());
}

TEST(TrajectoryVsStatic, ObstacleOnPathMidpoint) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({-1, 0}));
  scene.add_obstacle(Sphere{{1.5, 0, 0}, 0.1});
  const auto cand = line("c", "a", vec({-1, 0}), vec({1, 0}), 2.0);
  const CheckParams params{0.02, 0.06};
  const auto rep = trajectory_vs_static(cand, scene, {}, params);
  ASSERT_TRUE(rep.colliding());
  EXPECT_EQ(rep.witness->first.group, "a");
  EXPECT_EQ(rep.witness->second, (Owner{kStaticGroup, 0}));

  // Dense oracle at dt/100.
  std::optional<double> first_hit;
  const double step = params.dt / 100;
  for (int k = 0; k * step <= cand.duration() + 1e-12 && !first_hit; ++k) {
    const double t = k * step;
    for (const auto& p : forward_kinematics(scene.robot("a"), state_at(cand, t)))
      if (primitive_clearance(p, scene.static_obstacles[0]).signed_distance <= params.margin) first_hit = t;
  }
  ASSERT_TRUE(first_hit.has_value());
  EXPECT_NEAR(*rep.first_collision_time, *first_hit, params.dt);
  EXPECT_NEAR(*rep.first_collision_time, cand.duration() / 2, 0.2);
}

TEST(TrajectoryVsStatic, IdleArmOutOfReachIsClear) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({-1, 0}));
  scene.add_robot(planar_arm("b", 6, 0), vec({0, 0}));
  EXPECT_FALSE(trajectory_vs_static(line("c", "a", vec({-1, 0}), vec({1, 0}), 2.0), scene, {}, CheckParams{})
                   .colliding());
}

TEST(TrajectoryVsStatic, ExcludedGroupsAreSkipped) {
  Scene scene;
  scene.add_robot(planar_arm("a", 0, 0), vec({0, 0}));
  scene.add_robot(planar_arm("b", 1, 0, pi), vec({0, 0}));
  const JointTrajectory hold{"c", "a", {{0.0, vec({0, 0}), {}}}};
  EXPECT_TRUE(trajectory_vs_static(hold, scene, {}, CheckParams{}).colliding());
  EXPECT_FALSE(trajectory_vs_static(hold, scene, {"b"}, CheckParams{}).colliding());
}

Scene crossed_pair(double by, double bx = 1.5) {
  Scene scene;
  scene.add_robot(planar_arm("left", 0, 0), vec({0, 0}));
  scene.add_robot(planar_arm("right", bx, by, pi / 2), vec({0, 0}));
  return scene;
}

TEST(CompositeStateCheck, SingleArmHomeIsClear) {
  Scene scene;
  scene.add_robot(make_planar_arm("a", Transform::Identity(), {0.5, 0.5, 0.5}, 0.05, 1.0, 3.0), vec({0, 0, 0}));
  const auto rep = composite_state_check(scene.idle_postures, scene, 0.02);
  EXPECT_FALSE(rep.colliding());
  EXPECT_EQ(rep.states_evaluated, 1u);
}

TEST(CompositeStateCheck, OverlapReportsExactWitness) {
  const Scene scene = crossed_pair(-0.5);
  const auto rep = composite_state_check(scene.idle_postures, scene, 0.0);
  ASSERT_TRUE(rep.colliding());
  EXPECT_EQ(*rep.first_collision_time, 0.0);
  EXPECT_EQ(as_set(*rep.witness), (std::set<Owner>{{"left", 1}, {"right", 0}}));
  const auto oracle = primitive_clearance(forward_kinematics(scene.robot("left"), scene.idle_postures.at("left"))[1],
                                          forward_kinematics(scene.robot("right"), scene.idle_postures.at("right"))[0]);
  EXPECT_DOUBLE_EQ(rep.min_clearance_seen, oracle.signed_distance);
}

TEST(CompositeStateCheck, MarginAboveMeasuredClearance) {
  Scene scene;
  scene.add_robot(planar_arm("left", 0, 0), vec({0, 0}));
  scene.add_robot(planar_arm("right", 0, 0.3), vec({0, 0}));
  const double measured = composite_state_check(scene.idle_postures, scene, 0.0).min_clearance_seen;
  ASSERT_GT(measured, 0.0);
  EXPECT_FALSE(composite_state_check(scene.idle_postures, scene, measured - 1e-6).colliding());
  EXPECT_TRUE(composite_state_check(scene.idle_postures, scene, measured).colliding());
  EXPECT_TRUE(composite_state_check(scene.idle_postures, scene, measured + 0.01).colliding());
}

TEST(CompositeStateCheck, MissingGroupState) {
  const Scene scene = crossed_pair(-0.5);
  std::map<std::string, JointState> partial{{"left", scene.idle_postures.at("left")}};
  EXPECT_THROW(composite_state_check(partial, scene, 0.0), MissingGroupState);
}

TEST(CompositeStateCheck, EqualsMinimumOfPairwiseChecks) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> pos(-1.5, 1.5), ang(-3.0, 3.0);
  for (int round = 0; round < 200; ++round) {
    Scene scene;
    for (const char* g : {"a", "b", "c"})
      scene.add_robot(make_planar_arm(g, make_transform(Vec3(pos(rng), pos(rng), 0), Vec3(0, 0, ang(rng))),
                                      {0.6, 0.5, 0.4}, 0.05, 1.0, 3.0),
                      vec({ang(rng), ang(rng), ang(rng)}));
    scene.add_obstacle(Sphere{Vec3(pos(rng), pos(rng), 0), 0.1});
    scene.add_obstacle(Capsule{Vec3(pos(rng), pos(rng), 0), Vec3(pos(rng), pos(rng), 0), 0.05});

    double expect = std::numeric_limits<double>::infinity();
    std::vector<std::pair<std::string, std::vector<PlacedPrimitive>>> placed;
    for (const auto& [g, m] : scene.robots) {
      const auto prims = forward_kinematics(m, scene.idle_postures.at(g));
      for (std::size_t i = 0; i < prims.size(); ++i)
        for (std::size_t j = i + 1; j < prims.size(); ++j)
          if (!m.is_allowed(i, j)) expect = std::min(expect, primitive_clearance(prims[i], prims[j]).signed_distance);
      expect = std::min(expect, brute_min_clearance(prims, scene.static_obstacles).signed_distance);
      placed.emplace_back(g, prims);
    }
    for (std::size_t g = 0; g < placed.size(); ++g)
      for (std::size_t h = g + 1; h < placed.size(); ++h) {
        const auto& mg = scene.robot(placed[g].first);
        const auto& mh = scene.robot(placed[h].first);
        expect = std::min(expect, state_pair_check(mg, scene.idle_postures.at(mg.group_id()), mh,
                                                   scene.idle_postures.at(mh.group_id()))
                                      .signed_distance);
      }
    ASSERT_EQ(composite_state_check(scene.idle_postures, scene, 0.0).min_clearance_seen, expect) << round;
  }
}

}  // namespace
}  // namespace asyncexec
