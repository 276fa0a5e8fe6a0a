#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "asyncexec/collision.hpp"

namespace asyncexec {

struct Task {
  std::string group_id;
  Eigen::VectorXd goal;
  double submit_time = 0.0;
  // Falls back to ScenarioParams::default_timeout.
  std::optional<double> timeout;
};

struct ScenarioParams {
  CheckParams check;
  double tick = 0.01;
  int monitor_period = 5;
  double default_timeout = 30.0;
  bool check_static = true;
};

struct Scenario {
  std::string name;
  Scene scene;
  std::vector<Task> tasks;
  std::uint64_t seed = 0;
  ScenarioParams params;

  /// Throws ScenarioInvalid.
  void validate() const;
};

/// Parses the JSON scenario format (top-level keys robots, obstacles, tasks,
/// params, seed; radians and meters). Throws ScenarioInvalid.
Scenario parse_scenario(std::string_view json_text);

/// Throws IoFailure when the file cannot be read, ScenarioInvalid otherwise.
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace asyncexec
