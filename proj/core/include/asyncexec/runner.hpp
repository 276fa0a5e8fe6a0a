#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asyncexec/executor.hpp"
#include "asyncexec/metrics.hpp"
#include "asyncexec/scenario.hpp"

namespace asyncexec {

/// Exit codes of a scenario run.
inline constexpr int kExitClean = 0;
inline constexpr int kExitAborted = 2;
inline constexpr int kExitCollisionHalt = 3;

struct TaskOutcome {
  std::size_t task_index = 0;
  std::string trajectory_id;
  std::string group_id;
  double submitted = 0.0;
  double duration = 0.0;
  ExecStatus status;
};

struct RunResult {
  Metrics metrics;
  std::vector<Event> events;
  std::vector<ExecutionRecord> history;
  std::vector<TaskOutcome> tasks;
  std::vector<std::string> warnings;
  double end_clock = 0.0;
  int exit_code = kExitClean;
};

/// Drives a scenario to completion. Each group works through its tasks in
/// file order: a task is planned from the group's current posture and
/// submitted once its submit_time has passed and the group's previous task
/// has terminated. Sync mode serializes all execution.
RunResult run(const Scenario& scenario, Mode mode);

/// 3 if any collision halt occurred, 2 if any trajectory was aborted or
/// cancelled, 0 otherwise.
int exit_code_for(const std::vector<Event>& events);

struct SafetyReport {
  double min_clearance = std::numeric_limits<double>::infinity();
  double time = 0.0;
  std::optional<WitnessPair> witness;
  std::size_t samples = 0;
};

/// Replays executed motion (idle postures from `initial_scene`, then each
/// record of `history`) on a uniform grid of `step` over [0, end_time] and
/// returns the smallest inter-robot or robot-obstacle clearance seen.
SafetyReport verify_safety(const Scene& initial_scene, const std::vector<ExecutionRecord>& history,
                           double end_time, double step);

}  // namespace asyncexec
