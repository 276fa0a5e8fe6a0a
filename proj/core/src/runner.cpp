#include "asyncexec/runner.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"
#include "asyncexec/planner.hpp"

namespace asyncexec {

namespace {

constexpr std::uint64_t kMaxTicks = 50'000'000;
constexpr double kTimeEps = 1e-9;

}  // namespace

int exit_code_for(const std::vector<Event>& events) {
  int code = kExitClean;
  for (const auto& e : events) {
    if (e.kind == EventKind::CollisionHalt) return kExitCollisionHalt;
    if (e.kind == EventKind::TimeoutAbort || e.kind == EventKind::Cancelled) code = kExitAborted;
  }
  return code;
}

RunResult run(const Scenario& scenario, Mode mode) {
  scenario.validate();
  ExecutorConfig config;
  config.check = scenario.params.check;
  config.tick_length = scenario.params.tick;
  config.monitor_period = scenario.params.monitor_period;
  config.check_static = scenario.params.check_static;
  config.serialize = mode == Mode::Sync;
  ExecutionManager manager(scenario.scene, config);

  const std::size_t n = scenario.tasks.size();
  std::vector<std::optional<ExecHandle>> handles(n);
  std::vector<TaskOutcome> outcomes(n);

  // A task is ready when its time has come and every earlier task of its
  // group has terminated.
  auto submit_ready = [&] {
    const double now = manager.clock();
    std::map<std::string, bool> group_busy;
    for (std::size_t i = 0; i < n; ++i) {
      const Task& task = scenario.tasks[i];
      bool& busy = group_busy[task.group_id];
      if (handles[i]) {
        if (!is_terminal(manager.status(*handles[i]))) busy = true;
        continue;
      }
      if (busy || now + kTimeEps < task.submit_time) {
        busy = true;
        continue;
      }
      const RobotModel& model = scenario.scene.robot(task.group_id);
      JointTrajectory traj =
          plan_joint_line(model, manager.current_state(task.group_id), model.state(task.goal),
                          fmt::format("{}-{}", task.group_id, i));
      outcomes[i] = {i, traj.id, task.group_id, now, traj.duration(), exec::Pending{}};
      handles[i] = manager.submit(std::move(traj),
                                  task.timeout.value_or(scenario.params.default_timeout));
      busy = true;
    }
  };

  auto all_submitted = [&] {
    return std::all_of(handles.begin(), handles.end(), [](const auto& h) { return h.has_value(); });
  };

  submit_ready();
  while (!(all_submitted() && manager.quiescent())) {
    if (manager.tick_count() >= kMaxTicks)
      throw ScenarioInvalid(fmt::format("scenario '{}' did not finish within {} ticks", scenario.name, kMaxTicks));
    manager.tick();
    submit_ready();
  }

  RunResult result;
  result.events = manager.event_log();
  result.history = manager.history();
  result.warnings = manager.warnings();
  result.end_clock = manager.clock();
  for (std::size_t i = 0; i < n; ++i) outcomes[i].status = manager.status(*handles[i]);
  result.tasks = std::move(outcomes);
  result.metrics = compute_metrics(result.events, mode);
  result.exit_code = exit_code_for(result.events);
  return result;
}

SafetyReport verify_safety(const Scene& initial_scene, const std::vector<ExecutionRecord>& history,
                           double end_time, double step) {
  if (!(step > 0.0)) throw NonPositiveStep("safety replay step must be > 0");
  std::map<std::string, std::vector<const ExecutionRecord*>> per_group;
  for (const auto& rec : history) per_group[rec.group_id].push_back(&rec);
  for (auto& [group, recs] : per_group)
    std::stable_sort(recs.begin(), recs.end(),
                     [](const auto* a, const auto* b) { return a->start < b->start; });

  auto posture = [&](const std::string& group, double t) -> JointState {
    const auto it = per_group.find(group);
    const ExecutionRecord* active = nullptr;
    if (it != per_group.end())
      for (const auto* rec : it->second)
        if (rec->start <= t + kTimeEps) active = rec;
    if (!active) return initial_scene.idle_postures.at(group);
    const double until = active->stop ? std::min(t, *active->stop) : t;
    return state_at(active->trajectory, std::max(0.0, until - active->start));
  };

  SafetyReport report;
  const std::vector<double> times = sample_times(step, std::max(0.0, end_time));
  for (double t : times) {
    std::map<std::string, std::vector<PlacedPrimitive>> placed;
    for (const auto& [group, model] : initial_scene.robots)
      placed.emplace(group, forward_kinematics(model, posture(group, t)));
    Clearance best;
    for (auto a = placed.begin(); a != placed.end(); ++a) {
      for (auto b = std::next(a); b != placed.end(); ++b) {
        const Clearance c = min_cross_clearance(a->second, b->second);
        if (c.signed_distance < best.signed_distance) best = c;
      }
      const Clearance c = min_cross_clearance(a->second, initial_scene.static_obstacles);
      if (c.signed_distance < best.signed_distance) best = c;
    }
    ++report.samples;
    if (best.signed_distance < report.min_clearance) {
      report.min_clearance = best.signed_distance;
      report.time = t;
      report.witness = best.witness;
    }
  }
  return report;
}

}  // namespace asyncexec
