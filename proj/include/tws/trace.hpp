#pragma once

// JSON-lines trace: a header line, one line per event, and an End footer.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tws/geometry.hpp"

namespace tws {

inline constexpr const char* kTraceSchema = "tws-trace/1";

enum class EventKind {
  Step,
  Invoke,
  PhaseChange,
  Parent,
  Unparent,
  Abort,
  StartTeardown,
  TeleportAim,
  TeleportExec,
  TaskAction,
  CheckpointComplete,
  LegStart,
  LegEnd,
};

const char* to_string(EventKind kind);
EventKind parse_event_kind(const std::string& text);

struct TraceEvent {
  /// Event sequence number, strictly increasing.
  std::int64_t index = 0;
  /// Simulation tick; several events can share one.
  std::int64_t tick = 0;
  double t = 0.0;
  EventKind kind = EventKind::Step;
  Vec3 world;     // head, world frame
  Vec3 physical;  // head, tracking space
  nlohmann::ordered_json payload = nlohmann::ordered_json::object();
};

struct TraceHeader {
  std::string schema = kTraceSchema;
  std::uint64_t seed = 0;
  /// Digest binding the seed to the scenario and configuration.
  std::string seed_tag;
  std::string scenario_hash;
  nlohmann::ordered_json config;
};

struct Trace {
  TraceHeader header;
  std::vector<TraceEvent> events;
};

std::string seed_tag(std::uint64_t seed, const std::string& scenario_hash, const nlohmann::ordered_json& config);

std::string header_line(const TraceHeader& h);
std::string event_line(const TraceEvent& e);
std::string footer_line(std::size_t events);
/// Whole trace, newline-terminated lines.
std::string serialize(const Trace& trace);

/// Throws CorruptTrace (with 1-based line) for malformed input and
/// SeedMismatch when the header's seed does not match its tag.
Trace parse_trace(const std::string& text);
Trace read_trace_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace tws
