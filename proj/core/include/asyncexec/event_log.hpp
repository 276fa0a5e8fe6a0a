#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asyncexec {

enum class EventKind {
  Submitted,
  Admitted,
  Backlogged,
  Requeued,
  TimeoutAbort,
  CollisionHalt,
  Completed,
  Cancelled,
};

/// Wire name, e.g. "TIMEOUT_ABORT".
const char* to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

/// One log line: clock, kind, trajectory id and a detail string made of
/// space-separated key=value fields.
struct Event {
  double clock = 0.0;
  EventKind kind = EventKind::Submitted;
  std::string trajectory_id;
  std::string detail;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Fixed-point rendering with six fractional digits; never prints "-0.000000".
std::string format_fixed(double value);

/// `clock<TAB>kind<TAB>trajectory_id<TAB>detail`, without a newline.
std::string format_event(const Event& event);
std::string format_event_log(const std::vector<Event>& events);

/// Inverse of format_event. Throws ScenarioInvalid on malformed lines.
Event parse_event(std::string_view line);
std::vector<Event> parse_event_log(std::string_view text);

/// Splits a detail string into its key=value fields.
std::map<std::string, std::string> detail_fields(std::string_view detail);

}  // namespace asyncexec
