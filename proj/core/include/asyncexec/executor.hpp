#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "asyncexec/collision.hpp"
#include "asyncexec/event_log.hpp"
#include "asyncexec/trajectory.hpp"

namespace asyncexec {

struct ExecHandle {
  std::uint64_t id = 0;
  std::string group_id;
};

namespace exec {

struct Pending {};
struct Running {
  double start = 0.0;
};
/// Blockers are trajectory ids, or "idle:<group>" / "static" when the
/// candidate touched an idle arm or an obstacle.
struct Backlogged {
  std::set<std::string> blockers;
  double deadline = 0.0;
};
struct Succeeded {
  double finish = 0.0;
};
struct AbortedTimeout {
  double at = 0.0;
};
struct AbortedCollision {
  double at = 0.0;
  WitnessPair witness;
};
struct Cancelled {
  double at = 0.0;
  std::string reason;
};

}  // namespace exec

using ExecStatus = std::variant<exec::Pending, exec::Running, exec::Backlogged, exec::Succeeded,
                                exec::AbortedTimeout, exec::AbortedCollision, exec::Cancelled>;

bool is_terminal(const ExecStatus& status);
std::string to_string(const ExecStatus& status);

struct ExecutorConfig {
  CheckParams check;
  double tick_length = 0.01;
  int monitor_period = 5;
  // Clearance threshold of the online monitor; defaults to check.margin / 2,
  // the smallest clearance an admitted motion can reach between samples.
  std::optional<double> monitor_margin;
  // Admission also checks obstacles and idle arms.
  bool check_static = true;
  // Admit only while nothing runs (the synchronous baseline).
  bool serialize = false;
};

/// Interval during which a group executed a trajectory. `stop` is set once the
/// trajectory succeeded, was cancelled or was halted; the arm then rests at
/// state_at(trajectory, stop - start).
struct ExecutionRecord {
  std::string trajectory_id;
  std::string group_id;
  JointTrajectory trajectory;
  double start = 0.0;
  std::optional<double> stop;
};

/// Trajectory execution manager with a continuous admission queue, a backlog
/// of trajectories waiting on the ones they would collide with, per-submission
/// timeouts and a periodic composite-state monitor. Time is a simulated clock
/// that only advances through tick().
///
/// submit/cancel/status and the accessors may be called from several threads;
/// every call is serialized on one mutex.
class ExecutionManager {
 public:
  ExecutionManager(Scene scene, ExecutorConfig config);

  /// Queues a trajectory as Pending with deadline clock() + timeout.
  /// Throws UnknownGroup, or ValidationFailed for invalid trajectories,
  /// duplicate or malformed ids and non-positive timeouts.
  ExecHandle submit(JointTrajectory trajectory, double timeout);

  /// Advances the clock one tick and runs, in order: completion, re-queueing
  /// of entries whose blockers terminated, backlog timeouts, the admission
  /// drain and (every monitor_period ticks) the online monitor.
  std::vector<Event> tick();

  ExecStatus cancel(const ExecHandle& handle);
  ExecStatus status(const ExecHandle& handle) const;

  double clock() const;
  std::uint64_t tick_count() const;
  std::vector<Event> event_log() const;
  std::vector<ExecutionRecord> history() const;
  /// Current posture of a group: interpolated while running, held otherwise.
  JointState current_state(const std::string& group_id) const;
  /// True when nothing is pending, backlogged or running.
  bool quiescent() const;
  std::size_t running_count() const;
  const ExecutorConfig& config() const { return config_; }
  const Scene& scene() const { return scene_; }
  std::vector<std::string> warnings() const;

 private:
  struct Submission {
    ExecHandle handle;
    JointTrajectory trajectory;
    double submitted = 0.0;
    double deadline = 0.0;
    ExecStatus status;
    std::optional<std::size_t> record;
  };
  struct BacklogEntry {
    std::size_t submission = 0;
    std::set<std::string> blockers;
  };

  Submission& lookup(const ExecHandle& handle);
  const Submission& lookup(const ExecHandle& handle) const;
  JointState posture_locked(const std::string& group) const;
  void emit(std::vector<Event>& out, EventKind kind, const Submission& sub, std::string detail);
  void finish_running(std::size_t sub, double at);
  void complete_finished(std::vector<Event>& out);
  void requeue_unblocked(std::vector<Event>& out);
  void expire_backlog(std::vector<Event>& out);
  void drain_queue(std::vector<Event>& out);
  void admit_or_backlog(std::size_t sub, std::vector<Event>& out);
  void run_monitor(std::vector<Event>& out);

  mutable std::mutex mutex_;
  Scene scene_;
  ExecutorConfig config_;
  std::uint64_t ticks_ = 0;
  double clock_ = 0.0;
  std::vector<Submission> submissions_;
  std::map<std::string, std::size_t> by_trajectory_id_;
  std::map<std::string, std::size_t> running_;  // group -> submission (the set T)
  std::deque<std::size_t> queue_;
  std::vector<BacklogEntry> backlog_;
  std::set<std::string> triggers_;  // terminations not yet matched against the backlog
  std::vector<ExecutionRecord> history_;
  std::vector<Event> log_;
  std::vector<std::string> warnings_;
};

}  // namespace asyncexec
