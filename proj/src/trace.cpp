#include "tws/trace.hpp"

#include <fstream>
#include <sstream>

#include "tws/error.hpp"
#include "tws/scenario.hpp"

namespace tws {

using ojson = nlohmann::ordered_json;

namespace {

constexpr EventKind kKinds[] = {
    EventKind::Step,         EventKind::Invoke,     EventKind::PhaseChange,  EventKind::Parent,
    EventKind::Unparent,     EventKind::Abort,      EventKind::StartTeardown, EventKind::TeleportAim,
    EventKind::TeleportExec, EventKind::TaskAction, EventKind::CheckpointComplete, EventKind::LegStart,
    EventKind::LegEnd,
};

[[noreturn]] void corrupt(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::CorruptTrace, "line " + std::to_string(line) + ": " + what, line);
}

Vec3 parse_vec(const ojson& j, std::size_t line, const char* key) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 3) corrupt(line, std::string("bad '") + key + "'");
  for (const auto& v : j[key]) {
    if (!v.is_number()) corrupt(line, std::string("bad '") + key + "'");
  }
  return {j[key][0].get<double>(), j[key][1].get<double>(), j[key][2].get<double>()};
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Step: return "Step";
    case EventKind::Invoke: return "Invoke";
    case EventKind::PhaseChange: return "PhaseChange";
    case EventKind::Parent: return "Parent";
    case EventKind::Unparent: return "Unparent";
    case EventKind::Abort: return "Abort";
    case EventKind::StartTeardown: return "StartTeardown";
    case EventKind::TeleportAim: return "TeleportAim";
    case EventKind::TeleportExec: return "TeleportExec";
    case EventKind::TaskAction: return "TaskAction";
    case EventKind::CheckpointComplete: return "CheckpointComplete";
    case EventKind::LegStart: return "LegStart";
    case EventKind::LegEnd: return "LegEnd";
  }
  return "?";
}

EventKind parse_event_kind(const std::string& text) {
  for (EventKind k : kKinds) {
    if (text == to_string(k)) return k;
  }
  throw Error(ErrorCode::CorruptTrace, "unknown event kind '" + text + "'");
}

std::string seed_tag(std::uint64_t seed, const std::string& scenario_hash, const ojson& config) {
  return digest_hex(std::to_string(seed) + ":" + scenario_hash + ":" + config.dump());
}

std::string header_line(const TraceHeader& h) {
  ojson j;
  j["schema"] = h.schema;
  j["seed"] = h.seed;
  j["seed_tag"] = h.seed_tag;
  j["scenario_hash"] = h.scenario_hash;
  j["config"] = h.config;
  return j.dump();
}

std::string event_line(const TraceEvent& e) {
  ojson j;
  j["index"] = e.index;
  j["tick"] = e.tick;
  j["t"] = e.t;
  j["kind"] = to_string(e.kind);
  j["world"] = {e.world.x, e.world.y, e.world.z};
  j["physical"] = {e.physical.x, e.physical.y, e.physical.z};
  j["payload"] = e.payload;
  return j.dump();
}

std::string footer_line(std::size_t events) {
  ojson j;
  j["kind"] = "End";
  j["events"] = events;
  return j.dump();
}

std::string serialize(const Trace& trace) {
  std::string out = header_line(trace.header);
  out += '\n';
  for (const auto& e : trace.events) {
    out += event_line(e);
    out += '\n';
  }
  out += footer_line(trace.events.size());
  out += '\n';
  return out;
}

Trace parse_trace(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  bool footer = false;
  std::int64_t last_index = -1;
  std::int64_t last_tick = -1;
  double last_t = -1.0;
  while (std::getline(in, line)) {
    ++n;
    if (footer) corrupt(n, "content after the End footer");
    ojson j;
    try {
      j = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      corrupt(n, std::string("invalid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) corrupt(n, "expected an object");
    if (n == 1) {
      if (!j.contains("schema") || j["schema"] != kTraceSchema) corrupt(n, "unsupported schema");
      if (!j.contains("seed") || !j["seed"].is_number_unsigned() || !j.contains("seed_tag") ||
          !j["seed_tag"].is_string() || !j.contains("scenario_hash") || !j["scenario_hash"].is_string() ||
          !j.contains("config") || !j["config"].is_object()) {
        corrupt(n, "incomplete header");
      }
      trace.header.seed = j["seed"].get<std::uint64_t>();
      trace.header.seed_tag = j["seed_tag"].get<std::string>();
      trace.header.scenario_hash = j["scenario_hash"].get<std::string>();
      trace.header.config = j["config"];
      continue;
    }
    if (j.contains("kind") && j["kind"] == "End") {
      if (!j.contains("events") || !j["events"].is_number_unsigned() ||
          j["events"].get<std::size_t>() != trace.events.size()) {
        corrupt(n, "footer event count does not match");
      }
      footer = true;
      continue;
    }
    TraceEvent e;
    try {
      e.index = j.at("index").get<std::int64_t>();
      e.tick = j.at("tick").get<std::int64_t>();
      e.t = j.at("t").get<double>();
      e.kind = parse_event_kind(j.at("kind").get<std::string>());
      e.payload = j.at("payload");
    } catch (const nlohmann::json::exception& ex) {
      corrupt(n, std::string("malformed event (") + ex.what() + ")");
    } catch (const Error& ex) {
      corrupt(n, ex.what());
    }
    e.world = parse_vec(j, n, "world");
    e.physical = parse_vec(j, n, "physical");
    if (e.index <= last_index) corrupt(n, "event index is not increasing");
    if (e.tick < last_tick || e.t < last_t) corrupt(n, "event time goes backwards");
    last_index = e.index;
    last_tick = e.tick;
    last_t = e.t;
    trace.events.push_back(std::move(e));
  }
  if (n == 0) corrupt(1, "empty trace");
  if (!footer) corrupt(n, "missing End footer (truncated trace)");

  const std::string expected = seed_tag(trace.header.seed, trace.header.scenario_hash, trace.header.config);
  if (expected != trace.header.seed_tag) {
    throw Error(ErrorCode::SeedMismatch, "header seed " + std::to_string(trace.header.seed) +
                                             " does not match its seed tag (edited header?)");
  }
  return trace;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trace read_trace_file(const std::string& path) { return parse_trace(read_text_file(path)); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace tws
