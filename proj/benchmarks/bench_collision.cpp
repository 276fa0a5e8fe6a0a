#include <algorithm>
#include <random>

#include <benchmark/benchmark.h>

#include "asyncexec/collision.hpp"
#include "asyncexec/planner.hpp"
#include "asyncexec/runner.hpp"
#include "asyncexec/scenario.hpp"

namespace {

using namespace asyncexec;

std::vector<PlacedPrimitive> random_cloud(std::mt19937_64& rng, const std::string& group, int n,
                                          double spread) {
  std::uniform_real_distribution<double> pos(-spread, spread), r(0.02, 0.1);
  std::vector<PlacedPrimitive> out;
  for (int i = 0; i < n; ++i) {
    const Vec3 p0(pos(rng), pos(rng), pos(rng));
    const Vec3 p1 = p0 + Vec3(pos(rng), pos(rng), pos(rng)) * 0.1;
    out.push_back({Capsule{p0, p1, r(rng)}, Owner{group, i}});
  }
  return out;
}

const Scenario& panda() {
  static const Scenario sc = load_scenario(std::string(ASYNCEXEC_SCENARIO_DIR) + "/panda_like_shared.json");
  return sc;
}

Scenario crossing() { return load_scenario(std::string(ASYNCEXEC_SCENARIO_DIR) + "/crossing.json"); }

void BM_PrimitiveClearance(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_cloud(rng, "a", 256, 1.0);
  const auto b = random_cloud(rng, "b", 256, 1.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(primitive_clearance(a[i & 255], b[(i * 7) & 255]));
    ++i;
  }
}
BENCHMARK(BM_PrimitiveClearance);

void BM_MinCrossClearance(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  const auto a = random_cloud(rng, "a", n, 2.0);
  const auto b = random_cloud(rng, "b", n, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(min_cross_clearance(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_MinCrossClearance)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_BroadphasePairs(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const int n = static_cast<int>(state.range(0));
  const auto a = random_cloud(rng, "a", n, 2.0);
  const auto b = random_cloud(rng, "b", n, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(broadphase_pairs(a, b, 0.05));
  state.SetComplexityN(n);
}
BENCHMARK(BM_BroadphasePairs)->RangeMultiplier(4)->Range(8, 512)->Complexity();

void BM_ForwardKinematics7Dof(benchmark::State& state) {
  const RobotModel& m = panda().scene.robot("left");
  const JointState q = panda().scene.idle_postures.at("left");
  for (auto _ : state) benchmark::DoNotOptimize(forward_kinematics(m, q));
}
BENCHMARK(BM_ForwardKinematics7Dof);

void BM_CompositeStateCheck7Dof(benchmark::State& state) {
  const Scenario& sc = panda();
  for (auto _ : state) benchmark::DoNotOptimize(composite_state_check(sc.scene.idle_postures, sc.scene, 0.02));
}
BENCHMARK(BM_CompositeStateCheck7Dof);

// Admission check of one 7-dof motion against the other arm's motion, as a
// function of the discretization step in milliseconds.
void BM_TrajectoryVsRunning7Dof(benchmark::State& state) {
  const Scenario& sc = panda();
  const RobotModel& left = sc.scene.robot("left");
  const RobotModel& right = sc.scene.robot("right");
  const auto cand = plan_joint_line(left, sc.scene.idle_postures.at("left"), left.state(sc.tasks[0].goal), "c");
  const Task& rtask = *std::find_if(sc.tasks.begin(), sc.tasks.end(), [](const Task& t) { return t.group_id == "right"; });
  const auto run = plan_joint_line(right, sc.scene.idle_postures.at("right"), right.state(rtask.goal), "r");
  CheckParams params{static_cast<double>(state.range(0)) * 1e-3, 0.08};
  for (auto _ : state)
    benchmark::DoNotOptimize(trajectory_vs_running(cand, RunningRecord{run, 0.0}, 0.0, params, sc.scene));
}
BENCHMARK(BM_TrajectoryVsRunning7Dof)->Arg(50)->Arg(20)->Arg(10)->Arg(5)->Unit(benchmark::kMicrosecond);

void BM_RunCrossingFixture(benchmark::State& state) {
  const Scenario sc = crossing();
  const Mode mode = state.range(0) == 0 ? Mode::Async : Mode::Sync;
  for (auto _ : state) benchmark::DoNotOptimize(run(sc, mode));
}
BENCHMARK(BM_RunCrossingFixture)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunPandaFixture(benchmark::State& state) {
  const Scenario& sc = panda();
  for (auto _ : state) benchmark::DoNotOptimize(run(sc, Mode::Async));
}
BENCHMARK(BM_RunPandaFixture)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
