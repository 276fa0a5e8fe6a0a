#include "asyncexec/executor.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

// Clock comparisons tolerate accumulated rounding of tick multiples.
constexpr double kTimeEps = 1e-9;
// A backlogged start posture must match the held posture this closely.
constexpr double kStartTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join(const std::set<std::string>& items) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += ',';
    out += s;
  }
  return out;
}

bool valid_id(const std::string& id) {
  return !id.empty() && std::none_of(id.begin(), id.end(), [](char c) {
    return c == '\t' || c == '\n' || c == ' ' || c == ',' || c == '\r';
  });
}

std::string idle_blocker(const std::string& group) { return "idle:" + group; }

}  // namespace

bool is_terminal(const ExecStatus& status) {
  return std::holds_alternative<exec::Succeeded>(status) ||
         std::holds_alternative<exec::AbortedTimeout>(status) ||
         std::holds_alternative<exec::AbortedCollision>(status) ||
         std::holds_alternative<exec::Cancelled>(status);
}

std::string to_string(const ExecStatus& status) {
  return std::visit(
      Overloaded{
          [](const exec::Pending&) { return std::string("Pending"); },
          [](const exec::Running& s) { return fmt::format("Running(start={})", format_fixed(s.start)); },
          [](const exec::Backlogged& s) {
            return fmt::format("Backlogged(blockers={}, deadline={})", join(s.blockers),
                               format_fixed(s.deadline));
          },
          [](const exec::Succeeded& s) { return fmt::format("Succeeded(finish={})", format_fixed(s.finish)); },
          [](const exec::AbortedTimeout& s) { return fmt::format("AbortedTimeout(at={})", format_fixed(s.at)); },
          [](const exec::AbortedCollision& s) {
            return fmt::format("AbortedCollision(at={}, witness={}|{})", format_fixed(s.at),
                               to_string(s.witness.first), to_string(s.witness.second));
          },
          [](const exec::Cancelled& s) {
            return fmt::format("Cancelled(at={}, reason={})", format_fixed(s.at), s.reason);
          },
      },
      status);
}

ExecutionManager::ExecutionManager(Scene scene, ExecutorConfig config)
    : scene_(std::move(scene)), config_(std::move(config)) {
  scene_.validate();
  config_.check.validate();
  if (!(config_.tick_length > 0.0) || !std::isfinite(config_.tick_length))
    throw NonPositiveStep(fmt::format("tick length must be > 0, got {}", config_.tick_length));
  if (config_.monitor_period < 1)
    throw ContractViolation(fmt::format("monitor period must be >= 1 tick, got {}", config_.monitor_period));
  if (config_.monitor_margin && !(*config_.monitor_margin >= 0.0))
    throw ContractViolation("monitor margin must be >= 0");

  const double needed = required_margin(scene_, config_.check.dt);
  if (config_.check.margin < needed)
    warnings_.push_back(fmt::format(
        "margin {} m is below 2 x speed bound x dt = {} m; collisions between samples may go "
        "undetected at admission",
        config_.check.margin, needed));
}

ExecutionManager::Submission& ExecutionManager::lookup(const ExecHandle& handle) {
  if (handle.id >= submissions_.size() || submissions_[handle.id].handle.group_id != handle.group_id)
    throw UnknownHandle(fmt::format("unknown handle {} ({})", handle.id, handle.group_id));
  return submissions_[handle.id];
}

const ExecutionManager::Submission& ExecutionManager::lookup(const ExecHandle& handle) const {
  return const_cast<ExecutionManager*>(this)->lookup(handle);
}

void ExecutionManager::emit(std::vector<Event>& out, EventKind kind, const Submission& sub,
                            std::string detail) {
  Event e{clock_, kind, sub.trajectory.id,
          fmt::format("group={} {}", sub.handle.group_id, detail)};
  if (e.detail.back() == ' ') e.detail.pop_back();
  log_.push_back(e);
  out.push_back(std::move(e));
}

ExecHandle ExecutionManager::submit(JointTrajectory trajectory, double timeout) {
  std::lock_guard lock(mutex_);
  const RobotModel& model = scene_.robot(trajectory.group_id);
  if (!valid_id(trajectory.id))
    throw ValidationFailed(fmt::format("invalid trajectory id '{}'", trajectory.id));
  if (by_trajectory_id_.count(trajectory.id))
    throw ValidationFailed(fmt::format("trajectory id '{}' already submitted", trajectory.id));
  if (!(timeout > 0.0) || std::isnan(timeout))
    throw ValidationFailed(fmt::format("timeout must be > 0, got {}", timeout));
  const auto violations = validate(trajectory, model);
  if (!violations.empty()) {
    std::string msg = fmt::format("trajectory '{}' is invalid:", trajectory.id);
    for (const auto& v : violations)
      msg += fmt::format(" [{} @{}: {}]", to_string(v.kind), v.waypoint, v.message);
    throw ValidationFailed(msg);
  }

  Submission sub;
  sub.handle = ExecHandle{submissions_.size(), trajectory.group_id};
  sub.trajectory = std::move(trajectory);
  sub.submitted = clock_;
  sub.deadline = clock_ + timeout;
  sub.status = exec::Pending{};
  by_trajectory_id_[sub.trajectory.id] = sub.handle.id;
  submissions_.push_back(std::move(sub));
  Submission& stored = submissions_.back();
  queue_.push_back(stored.handle.id);
  std::vector<Event> sink;
  emit(sink, EventKind::Submitted, stored,
       fmt::format("duration={} deadline={}", format_fixed(stored.trajectory.duration()),
                   format_fixed(stored.deadline)));
  return stored.handle;
}

std::vector<Event> ExecutionManager::tick() {
  std::lock_guard lock(mutex_);
  ++ticks_;
  clock_ = static_cast<double>(ticks_) * config_.tick_length;
  std::vector<Event> out;
  complete_finished(out);
  requeue_unblocked(out);
  expire_backlog(out);
  drain_queue(out);
  if (ticks_ % static_cast<std::uint64_t>(config_.monitor_period) == 0) run_monitor(out);
  return out;
}

void ExecutionManager::finish_running(std::size_t index, double at) {
  Submission& sub = submissions_[index];
  ExecutionRecord& rec = history_[*sub.record];
  rec.stop = at;
  scene_.idle_postures[sub.handle.group_id] =
      state_at(sub.trajectory, std::max(0.0, at - rec.start));
}

void ExecutionManager::complete_finished(std::vector<Event>& out) {
  for (auto it = running_.begin(); it != running_.end();) {
    Submission& sub = submissions_[it->second];
    const double start = history_[*sub.record].start;
    if (clock_ + kTimeEps >= start + sub.trajectory.duration()) {
      finish_running(it->second, clock_);
      sub.status = exec::Succeeded{clock_};
      emit(out, EventKind::Completed, sub, fmt::format("finish={}", format_fixed(clock_)));
      triggers_.insert(sub.trajectory.id);
      it = running_.erase(it);
    } else {
      ++it;
    }
  }
}

void ExecutionManager::requeue_unblocked(std::vector<Event>& out) {
  if (triggers_.empty()) return;
  std::vector<BacklogEntry> kept;
  bool moved = false;
  for (auto& entry : backlog_) {
    const auto hit = std::find_if(entry.blockers.begin(), entry.blockers.end(),
                                  [&](const std::string& b) { return triggers_.count(b) > 0; });
    if (hit == entry.blockers.end()) {
      kept.push_back(std::move(entry));
      continue;
    }
    Submission& sub = submissions_[entry.submission];
    sub.status = exec::Pending{};
    emit(out, EventKind::Requeued, sub, fmt::format("after={}", *hit));
    queue_.push_back(entry.submission);
    moved = true;
  }
  backlog_ = std::move(kept);
  triggers_.clear();
  // Re-check order follows original submission order.
  if (moved) std::sort(queue_.begin(), queue_.end());
}

void ExecutionManager::expire_backlog(std::vector<Event>& out) {
  std::vector<BacklogEntry> kept;
  for (auto& entry : backlog_) {
    Submission& sub = submissions_[entry.submission];
    if (clock_ + kTimeEps >= sub.deadline) {
      sub.status = exec::AbortedTimeout{clock_};
      emit(out, EventKind::TimeoutAbort, sub,
           fmt::format("deadline={} checks=0 states=0", format_fixed(sub.deadline)));
    } else {
      kept.push_back(std::move(entry));
    }
  }
  backlog_ = std::move(kept);
}

void ExecutionManager::drain_queue(std::vector<Event>& out) {
  while (!queue_.empty()) {
    const std::size_t index = queue_.front();
    queue_.pop_front();
    if (!std::holds_alternative<exec::Pending>(submissions_[index].status)) continue;
    admit_or_backlog(index, out);
  }
}

void ExecutionManager::admit_or_backlog(std::size_t index, std::vector<Event>& out) {
  Submission& sub = submissions_[index];
  const std::string& group = sub.handle.group_id;
  std::set<std::string> blockers;
  std::size_t checks = 0;
  std::size_t states = 0;

  if (const auto own = running_.find(group); own != running_.end()) {
    // One controller per group.
    blockers.insert(submissions_[own->second].trajectory.id);
  } else if (config_.serialize && !running_.empty()) {
    for (const auto& [g, r] : running_) blockers.insert(submissions_[r].trajectory.id);
  } else {
    const JointState& held = scene_.idle_postures.at(group);
    if ((sub.trajectory.start_positions() - held.positions).lpNorm<Eigen::Infinity>() >
        kStartTolerance) {
      sub.status = exec::Cancelled{clock_, "mismatched_start"};
      emit(out, EventKind::Cancelled, sub, "reason=mismatched_start checks=0 states=0");
      return;
    }
    std::set<std::string> excluded{group};
    for (const auto& [g, r] : running_) {
      excluded.insert(g);
      const Submission& other = submissions_[r];
      const RunningRecord record{other.trajectory, history_[*other.record].start};
      const CollisionReport report =
          trajectory_vs_running(sub.trajectory, record, clock_, config_.check, scene_);
      ++checks;
      states += report.states_evaluated;
      if (report.colliding()) blockers.insert(other.trajectory.id);
    }
    if (config_.check_static) {
      const CollisionReport report =
          trajectory_vs_static(sub.trajectory, scene_, excluded, config_.check);
      ++checks;
      states += report.states_evaluated;
      if (report.colliding()) {
        const Owner& hit = report.witness->second;
        blockers.insert(hit.group == kStaticGroup ? std::string(kStaticGroup) : idle_blocker(hit.group));
      }
    }
  }

  const std::string counts = fmt::format("checks={} states={}", checks, states);
  if (blockers.empty()) {
    sub.status = exec::Running{clock_};
    running_[group] = index;
    sub.record = history_.size();
    history_.push_back({sub.trajectory.id, group, sub.trajectory, clock_, std::nullopt});
    emit(out, EventKind::Admitted, sub, fmt::format("start={} {}", format_fixed(clock_), counts));
    // Entries waiting on this group's idle posture must look again.
    triggers_.insert(idle_blocker(group));
  } else if (clock_ + kTimeEps >= sub.deadline) {
    sub.status = exec::AbortedTimeout{clock_};
    emit(out, EventKind::TimeoutAbort, sub,
         fmt::format("deadline={} {}", format_fixed(sub.deadline), counts));
  } else {
    sub.status = exec::Backlogged{blockers, sub.deadline};
    emit(out, EventKind::Backlogged, sub,
         fmt::format("blockers={} deadline={} {}", join(blockers), format_fixed(sub.deadline), counts));
    backlog_.push_back({index, std::move(blockers)});
  }
}

JointState ExecutionManager::posture_locked(const std::string& group) const {
  if (const auto it = running_.find(group); it != running_.end()) {
    const Submission& sub = submissions_[it->second];
    return state_at(sub.trajectory, std::max(0.0, clock_ - history_[*sub.record].start));
  }
  const auto idle = scene_.idle_postures.find(group);
  if (idle == scene_.idle_postures.end()) throw UnknownGroup(fmt::format("unknown group '{}'", group));
  return idle->second;
}

void ExecutionManager::run_monitor(std::vector<Event>& out) {
  if (running_.empty()) return;
  std::map<std::string, JointState> states;
  for (const auto& [group, model] : scene_.robots) states.emplace(group, posture_locked(group));
  const double threshold = config_.monitor_margin.value_or(0.5 * config_.check.margin);
  const CollisionReport report = composite_state_check(states, scene_, threshold);
  if (!report.colliding()) return;

  const WitnessPair witness = *report.witness;
  for (const auto& [group, index] : running_) {
    Submission& sub = submissions_[index];
    finish_running(index, clock_);
    sub.status = exec::AbortedCollision{clock_, witness};
    emit(out, EventKind::CollisionHalt, sub,
         fmt::format("witness={}|{} clearance={}", to_string(witness.first), to_string(witness.second),
                     format_fixed(report.min_clearance_seen)));
    triggers_.insert(sub.trajectory.id);
  }
  running_.clear();
}

ExecStatus ExecutionManager::cancel(const ExecHandle& handle) {
  std::lock_guard lock(mutex_);
  Submission& sub = lookup(handle);
  if (is_terminal(sub.status)) return sub.status;
  std::vector<Event> sink;
  if (std::holds_alternative<exec::Pending>(sub.status)) {
    queue_.erase(std::remove(queue_.begin(), queue_.end(), handle.id), queue_.end());
  } else if (std::holds_alternative<exec::Backlogged>(sub.status)) {
    std::erase_if(backlog_, [&](const BacklogEntry& e) { return e.submission == handle.id; });
  } else {
    // Running: freeze the arm where it is now.
    finish_running(handle.id, clock_);
    running_.erase(sub.handle.group_id);
    triggers_.insert(sub.trajectory.id);
  }
  sub.status = exec::Cancelled{clock_, "user"};
  emit(sink, EventKind::Cancelled, sub, "reason=user checks=0 states=0");
  return sub.status;
}

ExecStatus ExecutionManager::status(const ExecHandle& handle) const {
  std::lock_guard lock(mutex_);
  return lookup(handle).status;
}

double ExecutionManager::clock() const {
  std::lock_guard lock(mutex_);
  return clock_;
}

std::uint64_t ExecutionManager::tick_count() const {
  std::lock_guard lock(mutex_);
  return ticks_;
}

std::vector<Event> ExecutionManager::event_log() const {
  std::lock_guard lock(mutex_);
  return log_;
}

std::vector<ExecutionRecord> ExecutionManager::history() const {
  std::lock_guard lock(mutex_);
  return history_;
}

JointState ExecutionManager::current_state(const std::string& group_id) const {
  std::lock_guard lock(mutex_);
  return posture_locked(group_id);
}

bool ExecutionManager::quiescent() const {
  std::lock_guard lock(mutex_);
  return running_.empty() && backlog_.empty() && queue_.empty();
}

std::size_t ExecutionManager::running_count() const {
  std::lock_guard lock(mutex_);
  return running_.size();
}

std::vector<std::string> ExecutionManager::warnings() const {
  std::lock_guard lock(mutex_);
  return warnings_;
}

}  // namespace asyncexec
