#include "asyncexec/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

double number(const std::map<std::string, std::string>& fields, const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) throw ScenarioInvalid(fmt::format("event detail lacks '{}'", key));
  return std::stod(it->second);
}

std::size_t count(const std::map<std::string, std::string>& fields, const std::string& key) {
  const auto it = fields.find(key);
  return it == fields.end() ? 0 : static_cast<std::size_t>(std::stoull(it->second));
}

bool terminal(EventKind kind) {
  return kind == EventKind::Completed || kind == EventKind::TimeoutAbort ||
         kind == EventKind::CollisionHalt || kind == EventKind::Cancelled;
}

}  // namespace

const char* to_string(Mode mode) { return mode == Mode::Async ? "async" : "sync"; }

std::optional<Mode> parse_mode(std::string_view name) {
  if (name == "async") return Mode::Async;
  if (name == "sync") return Mode::Sync;
  return std::nullopt;
}

Metrics compute_metrics(const std::vector<Event>& events, Mode mode) {
  Metrics m;
  m.mode = mode;
  std::map<std::string, double> submitted_at;
  std::map<std::string, double> duration;
  std::map<std::string, double> busy;  // group -> summed durations of admitted trajectories
  std::optional<double> first;
  std::optional<double> last;

  for (const Event& e : events) {
    const auto fields = detail_fields(e.detail);
    switch (e.kind) {
      case EventKind::Submitted:
        submitted_at[e.trajectory_id] = e.clock;
        duration[e.trajectory_id] = number(fields, "duration");
        first = first ? std::min(*first, e.clock) : e.clock;
        break;
      case EventKind::Admitted: {
        const auto sub = submitted_at.find(e.trajectory_id);
        const double wait = sub == submitted_at.end() ? 0.0 : e.clock - sub->second;
        m.waits.push_back({e.trajectory_id, wait});
        busy[fields.at("group")] += duration[e.trajectory_id];
        break;
      }
      case EventKind::Backlogged: ++m.backlog_entries; break;
      case EventKind::TimeoutAbort: ++m.timeout_aborts; break;
      case EventKind::CollisionHalt: ++m.collision_halts; break;
      default: break;
    }
    m.pairwise_checks += count(fields, "checks");
    m.state_evaluations += count(fields, "states");
    if (terminal(e.kind)) last = last ? std::max(*last, e.clock) : e.clock;
  }

  if (first && last) m.makespan = *last - *first;
  if (!m.waits.empty()) {
    double sum = 0.0;
    for (const auto& w : m.waits) sum += w.wait;
    m.mean_wait = sum / static_cast<double>(m.waits.size());
  }
  for (const auto& [group, total] : busy) m.lower_bound = std::max(m.lower_bound, total);
  m.overhead = m.makespan - m.lower_bound;
  return m;
}

std::string metrics_csv(const Metrics& m) {
  return fmt::format("{}\n{},{},{},{},{},{},{},{},{}\n", kMetricsHeader, to_string(m.mode),
                     format_fixed(m.makespan), format_fixed(m.mean_wait), m.backlog_entries,
                     m.timeout_aborts, m.collision_halts, m.pairwise_checks, m.state_evaluations,
                     format_fixed(m.overhead));
}

void write_metrics(const Metrics& metrics, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure(fmt::format("cannot write metrics to '{}'", path.string()));
  out << metrics_csv(metrics);
  if (!out) throw IoFailure(fmt::format("failed writing metrics to '{}'", path.string()));
}

}  // namespace asyncexec
