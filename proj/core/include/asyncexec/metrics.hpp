#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asyncexec/event_log.hpp"

namespace asyncexec {

enum class Mode { Async, Sync };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct TaskWait {
  std::string trajectory_id;
  double wait = 0.0;  // submission to admission
};

struct Metrics {
  Mode mode = Mode::Async;
  double makespan = 0.0;  // first submission to last terminal event
  std::vector<TaskWait> waits;
  double mean_wait = 0.0;
  std::size_t backlog_entries = 0;
  std::size_t timeout_aborts = 0;
  std::size_t collision_halts = 0;
  std::size_t pairwise_checks = 0;
  std::size_t state_evaluations = 0;
  // Busiest group's summed durations of the trajectories that ran.
  double lower_bound = 0.0;
  double overhead = 0.0;  // makespan - lower_bound
};

/// Metrics are a pure function of the event log.
Metrics compute_metrics(const std::vector<Event>& events, Mode mode);

inline constexpr std::string_view kMetricsHeader =
    "mode,makespan_s,mean_wait_s,backlog_entries,timeout_aborts,collision_halts,"
    "pairwise_checks,state_evaluations,overhead_s";

/// Header line plus one data row, newline terminated.
std::string metrics_csv(const Metrics& metrics);

/// Throws IoFailure.
void write_metrics(const Metrics& metrics, const std::filesystem::path& path);

}  // namespace asyncexec
