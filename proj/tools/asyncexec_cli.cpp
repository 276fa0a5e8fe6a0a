// asyncexec: run execution scenarios through the asynchronous trajectory
// execution manager and report schedule metrics.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "asyncexec/errors.hpp"
#include "asyncexec/runner.hpp"
#include "asyncexec/scenario.hpp"

namespace {

struct RunArgs {
  std::string scenario;
  std::string mode = "async";
  std::optional<double> time_step;
  std::optional<double> tick;
  std::optional<double> margin;
  std::optional<double> backlog_timeout;
  std::optional<int> monitor_period;
  bool no_static_check = false;
  std::string metrics_out;
  std::string events_out;
};

int run_command(const RunArgs& args) {
  using namespace asyncexec;
  Scenario scenario = load_scenario(args.scenario);
  const auto mode = parse_mode(args.mode);
  if (!mode) throw ScenarioInvalid(fmt::format("unknown mode '{}'", args.mode));
  if (args.time_step) scenario.params.check.dt = *args.time_step;
  if (args.tick) scenario.params.tick = *args.tick;
  if (args.margin) scenario.params.check.margin = *args.margin;
  if (args.backlog_timeout) scenario.params.default_timeout = *args.backlog_timeout;
  if (args.monitor_period) scenario.params.monitor_period = *args.monitor_period;
  if (args.no_static_check) scenario.params.check_static = false;

  const RunResult result = run(scenario, *mode);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  if (!args.events_out.empty()) {
    std::ofstream out(args.events_out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoFailure(fmt::format("cannot write events to '{}'", args.events_out));
    out << format_event_log(result.events);
  }
  if (!args.metrics_out.empty()) write_metrics(result.metrics, args.metrics_out);

  const Metrics& m = result.metrics;
  std::cout << fmt::format(
      "scenario={} mode={} makespan={} mean_wait={} backlog={} timeouts={} halts={} "
      "checks={} states={} overhead={}\n",
      scenario.name, to_string(m.mode), format_fixed(m.makespan), format_fixed(m.mean_wait),
      m.backlog_entries, m.timeout_aborts, m.collision_halts, m.pairwise_checks,
      m.state_evaluations, format_fixed(m.overhead));
  for (const auto& t : result.tasks)
    std::cout << fmt::format("  {} [{}] duration={} {}\n", t.trajectory_id, t.group_id,
                             format_fixed(t.duration), to_string(t.status));
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous multi-robot trajectory execution simulator"};
  app.require_subcommand(1);

  RunArgs args;
  CLI::App* run = app.add_subcommand("run", "Execute a scenario file");
  run->add_option("--scenario", args.scenario, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--mode", args.mode, "async or sync")->check(CLI::IsMember({"async", "sync"}));
  run->add_option("--time-step", args.time_step, "Collision check discretization step [s]");
  run->add_option("--tick", args.tick, "Simulation tick length [s]");
  run->add_option("--margin", args.margin, "Collision clearance margin [m]");
  run->add_option("--backlog-timeout", args.backlog_timeout,
                  "Timeout for tasks without their own [s]");
  run->add_option("--monitor-period", args.monitor_period, "Online monitor period [ticks]");
  run->add_flag("--no-static-check", args.no_static_check,
                "Skip obstacle and idle-arm checks at admission");
  run->add_option("--metrics-out", args.metrics_out, "Write metrics CSV here");
  run->add_option("--events-out", args.events_out, "Write the event log here");

  CLI11_PARSE(app, argc, argv);

  try {
    return run_command(args);
  } catch (const asyncexec::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
