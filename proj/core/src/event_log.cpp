#include "asyncexec/event_log.hpp"

#include <array>
#include <charconv>
#include <sstream>
#include <utility>

#include <fmt/format.h>

#include "asyncexec/errors.hpp"

namespace asyncexec {

namespace {

constexpr std::array<std::pair<EventKind, const char*>, 8> kNames{{
    {EventKind::Submitted, "SUBMITTED"},
    {EventKind::Admitted, "ADMITTED"},
    {EventKind::Backlogged, "BACKLOGGED"},
    {EventKind::Requeued, "REQUEUED"},
    {EventKind::TimeoutAbort, "TIMEOUT_ABORT"},
    {EventKind::CollisionHalt, "COLLISION_HALT"},
    {EventKind::Completed, "COMPLETED"},
    {EventKind::Cancelled, "CANCELLED"},
}};

}  // namespace

const char* to_string(EventKind kind) {
  for (const auto& [k, name] : kNames)
    if (k == kind) return name;
  return "UNKNOWN";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kNames)
    if (name == n) return k;
  return std::nullopt;
}

std::string format_fixed(double value) {
  std::string s = fmt::format("{:.6f}", value);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

std::string format_event(const Event& event) {
  return fmt::format("{}\t{}\t{}\t{}", format_fixed(event.clock), to_string(event.kind),
                     event.trajectory_id, event.detail);
}

std::string format_event_log(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

Event parse_event(std::string_view line) {
  std::array<std::string_view, 4> cols;
  std::size_t start = 0;
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t tab = c < 3 ? line.find('\t', start) : std::string_view::npos;
    if (c < 3 && tab == std::string_view::npos)
      throw ScenarioInvalid(fmt::format("malformed event line '{}'", line));
    cols[c] = line.substr(start, tab == std::string_view::npos ? line.size() - start : tab - start);
    start = tab + 1;
  }
  Event e;
  // strtod rather than from_chars: libstdc++ 11 lacks floating from_chars.
  const std::string clock(cols[0]);
  char* end = nullptr;
  e.clock = std::strtod(clock.c_str(), &end);
  if (end != clock.c_str() + clock.size())
    throw ScenarioInvalid(fmt::format("bad clock '{}'", clock));
  const auto kind = parse_event_kind(cols[1]);
  if (!kind) throw ScenarioInvalid(fmt::format("unknown event kind '{}'", cols[1]));
  e.kind = *kind;
  e.trajectory_id = std::string(cols[2]);
  e.detail = std::string(cols[3]);
  return e;
}

std::vector<Event> parse_event_log(std::string_view text) {
  std::vector<Event> events;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(start, nl - start);
    if (!line.empty()) events.push_back(parse_event(line));
    start = nl + 1;
  }
  return events;
}

std::map<std::string, std::string> detail_fields(std::string_view detail) {
  std::map<std::string, std::string> fields;
  std::istringstream in{std::string(detail)};
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) continue;
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return fields;
}

}  // namespace asyncexec
