#include "tws/config.hpp"

#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tws/error.hpp"

namespace tws {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::Config, where + ": " + what);
}

void check_keys(const ojson& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected a table");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : keys) known = known || item.key() == k;
    if (!known) bad(where, "unknown key '" + item.key() + "'");
  }
}

double num(const ojson& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

void read(const ojson& j, const char* key, double& out, const std::string& where) {
  if (j.contains(key)) out = num(j[key], where + "." + key);
}

void read(const ojson& j, const char* key, bool& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j[key].is_boolean()) bad(where + "." + key, "expected true or false");
  out = j[key].get<bool>();
}

void read(const ojson& j, const char* key, int& out, const std::string& where) {
  if (!j.contains(key)) return;
  if (!j[key].is_number_integer()) bad(where + "." + key, "expected an integer");
  out = j[key].get<int>();
}

std::string str(const ojson& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

Vec3 vec3(const ojson& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) bad(where, "expected [x, y, z]");
  return {num(j[0], where), num(j[1], where), num(j[2], where)};
}

Vec2 vec2(const ojson& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad(where, "expected [x, z]");
  return {num(j[0], where), num(j[1], where)};
}

std::vector<double> numbers(const ojson& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(num(v, where));
  return out;
}

ojson v3(const Vec3& v) { return {v.x, v.y, v.z}; }
ojson v2(const Vec2& v) { return {v.x, v.y}; }

ojson yaml_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Sequence: {
      ojson arr = ojson::array();
      for (const auto& child : node) arr.push_back(yaml_to_json(child));
      return arr;
    }
    case YAML::NodeType::Map: {
      ojson obj = ojson::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
      return obj;
    }
    case YAML::NodeType::Scalar: break;
  }
  const std::string s = node.Scalar();
  if (node.Tag() == "!") return s;  // quoted
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "null" || s == "~") return nullptr;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(s, &used);
    if (used == s.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used == s.size()) return d;
  } catch (const std::exception&) {
  }
  return s;
}

}  // namespace

std::string gain_strategy_name(const GainStrategy& g) {
  if (std::holds_alternative<FixedGain>(g)) return "fixed-gain";
  if (std::holds_alternative<FixedCabinLength>(g)) return "fixed-cabin-length";
  return "adaptive";
}

GainStrategy make_gain_strategy(const std::string& name, double value) {
  if (name == "fixed-gain") return FixedGain{value};
  if (name == "fixed-cabin-length") return FixedCabinLength{value};
  if (name == "adaptive") return AdaptiveToPlayspace{};
  throw Error(ErrorCode::Config, "unknown gain strategy '" + name +
                                      "' (expected fixed-gain, fixed-cabin-length or adaptive)");
}

void RunConfig::validate() const {
  if (!(ticks_per_second > 0.0)) throw Error(ErrorCode::Config, "ticks per second must be > 0");
  if (!(max_sim_seconds > 0.0)) throw Error(ErrorCode::Config, "max simulated time must be > 0");
  if (const auto* g = std::get_if<FixedGain>(&gain); g && !(g->gain >= 1.0)) {
    throw Error(ErrorCode::Config, "gain must be ≥ 1");
  }
  if (const auto* c = std::get_if<FixedCabinLength>(&gain); c && !(c->length > 0.0)) {
    throw Error(ErrorCode::Config, "cabin length must be > 0");
  }
  try {
    if (!(tunnel.width > 0.0) || !(tunnel.height > 0.0)) {
      throw Error(ErrorCode::Config, "cabin width and height must be > 0");
    }
    if (!(tunnel.exit_clearance >= 0.0) || !(tunnel.body_radius >= 0.0)) {
      throw Error(ErrorCode::Config, "exit clearance and body radius must be >= 0");
    }
    tunnel.windows.validate(tunnel.height);
    phases.validate();
    teleport.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  agent.validate();
}

ojson config_to_json(const RunConfig& c) {
  ojson j;
  j["scenario"] = c.scenario;
  j["technique"] = to_string(c.technique);
  j["seed"] = c.seed;
  j["ticks_per_second"] = c.ticks_per_second;
  j["max_sim_seconds"] = c.max_sim_seconds;

  ojson gain;
  gain["strategy"] = gain_strategy_name(c.gain);
  if (const auto* g = std::get_if<FixedGain>(&c.gain)) gain["value"] = g->gain;
  if (const auto* l = std::get_if<FixedCabinLength>(&c.gain)) gain["value"] = l->length;
  j["gain"] = gain;

  const TunnelParams& t = c.tunnel;
  j["tunnel"] = {{"width", t.width},
                 {"height", t.height},
                 {"exit_clearance", t.exit_clearance},
                 {"body_radius", t.body_radius},
                 {"driver", t.driver == ScalingDriver::Head ? "head" : "center-of-mass"},
                 {"windows",
                  {{"stripe_count", t.windows.stripe_count},
                   {"stripe_height", t.windows.stripe_height},
                   {"stripe_spacing", t.windows.stripe_spacing},
                   {"sill_height", t.windows.sill_height}}}};

  const PhaseDurations& p = c.phases;
  j["phases"] = {{"rising_half", p.rising_half},     {"extending", p.extending},
                 {"rising_full", p.rising_full},     {"doors_opening", p.doors_opening},
                 {"doors_closing", p.doors_closing}, {"retracting", p.retracting},
                 {"speed_schedule", p.speed_schedule}};

  const TeleportConfig& tp = c.teleport;
  j["teleport"] = {{"max_range", tp.max_range},
                   {"aim_model", tp.aim_model == AimModel::StraightRay ? "straight-ray" : "parabolic"},
                   {"cooldown", tp.cooldown},
                   {"clamp_to_range", tp.clamp_to_range},
                   {"launch_speed", tp.launch_speed},
                   {"gravity", tp.gravity},
                   {"ground_height", tp.ground_height}};

  const AgentProfile& a = c.agent;
  j["agent"] = {{"walk_speed", a.walk_speed},
                {"step_cadence", a.step_cadence},
                {"bob_vertical", a.bob_vertical},
                {"bob_lateral", a.bob_lateral},
                {"task_time_per_item", a.task_time_per_item},
                {"teleport_threshold", a.teleport_threshold},
                {"eye_height", a.eye_height},
                {"aim_time", a.aim_time},
                {"hop_fraction", a.hop_fraction},
                {"arrival_tolerance", a.arrival_tolerance},
                {"exit_overshoot", a.exit_overshoot},
                {"jitter", a.jitter}};

  const ScenarioLayout& l = c.layout;
  ojson cps = ojson::array();
  for (const auto& cp : l.checkpoints) cps.push_back(v3(cp));
  ojson drops = ojson::array();
  for (const auto& d : l.tasks.dropoffs) drops.push_back(v2(d));
  j["layout"] = {{"level", to_string(l.level)},
                 {"start", v3(l.start)},
                 {"heading_deg", l.heading_deg},
                 {"lengths", l.lengths},
                 {"turns_deg", l.turns_deg},
                 {"checkpoints", cps},
                 {"playspace", {{"half_extents", v2(l.playspace_half_extents)}, {"origin", v2(l.playspace_origin)}}},
                 {"min_half_extent", l.min_half_extent},
                 {"tasks", {{"items", l.tasks.items}, {"pickup", v2(l.tasks.pickup)}, {"dropoffs", drops}}},
                 {"platform_radius", l.platform_radius},
                 {"platform_setback", l.platform_setback},
                 {"rear_margin", l.rear_margin},
                 {"button_reach", l.button_reach},
                 {"nav_margin", l.nav_margin}};
  return j;
}

RunConfig config_from_json(const ojson& j, RunConfig c) {
  check_keys(j, "config",
             {"scenario", "technique", "seed", "ticks_per_second", "max_sim_seconds", "gain", "tunnel", "phases",
              "teleport", "agent", "layout"});
  if (j.contains("scenario")) c.scenario = str(j["scenario"], "scenario");
  if (j.contains("technique")) c.technique = parse_technique(str(j["technique"], "technique"));
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0)) {
      bad("seed", "expected an unsigned 64-bit integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  read(j, "ticks_per_second", c.ticks_per_second, "config");
  read(j, "max_sim_seconds", c.max_sim_seconds, "config");

  if (j.contains("gain")) {
    const ojson& g = j["gain"];
    check_keys(g, "gain", {"strategy", "value"});
    const std::string name = g.contains("strategy") ? str(g["strategy"], "gain.strategy") : gain_strategy_name(c.gain);
    double value = 30.0;
    if (const auto* fg = std::get_if<FixedGain>(&c.gain)) value = fg->gain;
    if (const auto* fl = std::get_if<FixedCabinLength>(&c.gain)) value = fl->length;
    if (name == "fixed-cabin-length" && !std::holds_alternative<FixedCabinLength>(c.gain)) value = 2.0;
    if (name == "fixed-gain" && !std::holds_alternative<FixedGain>(c.gain)) value = 30.0;
    read(g, "value", value, "gain");
    c.gain = make_gain_strategy(name, value);
  }

  if (j.contains("tunnel")) {
    const ojson& t = j["tunnel"];
    check_keys(t, "tunnel", {"width", "height", "exit_clearance", "body_radius", "driver", "windows"});
    read(t, "width", c.tunnel.width, "tunnel");
    read(t, "height", c.tunnel.height, "tunnel");
    read(t, "exit_clearance", c.tunnel.exit_clearance, "tunnel");
    read(t, "body_radius", c.tunnel.body_radius, "tunnel");
    if (t.contains("driver")) {
      const std::string d = str(t["driver"], "tunnel.driver");
      if (d == "head") c.tunnel.driver = ScalingDriver::Head;
      else if (d == "center-of-mass") c.tunnel.driver = ScalingDriver::CenterOfMass;
      else bad("tunnel.driver", "expected head or center-of-mass");
    }
    if (t.contains("windows")) {
      const ojson& w = t["windows"];
      check_keys(w, "tunnel.windows", {"stripe_count", "stripe_height", "stripe_spacing", "sill_height"});
      read(w, "stripe_count", c.tunnel.windows.stripe_count, "tunnel.windows");
      read(w, "stripe_height", c.tunnel.windows.stripe_height, "tunnel.windows");
      read(w, "stripe_spacing", c.tunnel.windows.stripe_spacing, "tunnel.windows");
      read(w, "sill_height", c.tunnel.windows.sill_height, "tunnel.windows");
    }
  }

  if (j.contains("phases")) {
    const ojson& p = j["phases"];
    check_keys(p, "phases",
               {"rising_half", "extending", "rising_full", "doors_opening", "doors_closing", "retracting",
                "speed_schedule"});
    read(p, "rising_half", c.phases.rising_half, "phases");
    read(p, "extending", c.phases.extending, "phases");
    read(p, "rising_full", c.phases.rising_full, "phases");
    read(p, "doors_opening", c.phases.doors_opening, "phases");
    read(p, "doors_closing", c.phases.doors_closing, "phases");
    read(p, "retracting", c.phases.retracting, "phases");
    if (p.contains("speed_schedule")) c.phases.speed_schedule = numbers(p["speed_schedule"], "phases.speed_schedule");
  }

  if (j.contains("teleport")) {
    const ojson& t = j["teleport"];
    check_keys(t, "teleport",
               {"max_range", "aim_model", "cooldown", "clamp_to_range", "launch_speed", "gravity", "ground_height"});
    read(t, "max_range", c.teleport.max_range, "teleport");
    if (t.contains("aim_model")) {
      const std::string m = str(t["aim_model"], "teleport.aim_model");
      if (m == "straight-ray") c.teleport.aim_model = AimModel::StraightRay;
      else if (m == "parabolic") c.teleport.aim_model = AimModel::Parabolic;
      else bad("teleport.aim_model", "expected straight-ray or parabolic");
    }
    read(t, "cooldown", c.teleport.cooldown, "teleport");
    read(t, "clamp_to_range", c.teleport.clamp_to_range, "teleport");
    read(t, "launch_speed", c.teleport.launch_speed, "teleport");
    read(t, "gravity", c.teleport.gravity, "teleport");
    read(t, "ground_height", c.teleport.ground_height, "teleport");
  }

  if (j.contains("agent")) {
    const ojson& a = j["agent"];
    check_keys(a, "agent",
               {"walk_speed", "step_cadence", "bob_vertical", "bob_lateral", "task_time_per_item",
                "teleport_threshold", "eye_height", "aim_time", "hop_fraction", "arrival_tolerance", "exit_overshoot",
                "jitter"});
    read(a, "walk_speed", c.agent.walk_speed, "agent");
    read(a, "step_cadence", c.agent.step_cadence, "agent");
    read(a, "bob_vertical", c.agent.bob_vertical, "agent");
    read(a, "bob_lateral", c.agent.bob_lateral, "agent");
    read(a, "task_time_per_item", c.agent.task_time_per_item, "agent");
    read(a, "teleport_threshold", c.agent.teleport_threshold, "agent");
    read(a, "eye_height", c.agent.eye_height, "agent");
    read(a, "aim_time", c.agent.aim_time, "agent");
    read(a, "hop_fraction", c.agent.hop_fraction, "agent");
    read(a, "arrival_tolerance", c.agent.arrival_tolerance, "agent");
    read(a, "exit_overshoot", c.agent.exit_overshoot, "agent");
    read(a, "jitter", c.agent.jitter, "agent");
  }

  if (j.contains("layout")) {
    const ojson& l = j["layout"];
    ScenarioLayout& o = c.layout;
    check_keys(l, "layout",
               {"level", "start", "heading_deg", "lengths", "turns_deg", "checkpoints", "playspace",
                "min_half_extent", "tasks", "platform_radius", "platform_setback", "rear_margin", "button_reach",
                "nav_margin"});
    if (l.contains("level")) o.level = parse_level(str(l["level"], "layout.level"));
    if (l.contains("start")) o.start = vec3(l["start"], "layout.start");
    read(l, "heading_deg", o.heading_deg, "layout");
    if (l.contains("lengths")) o.lengths = numbers(l["lengths"], "layout.lengths");
    if (l.contains("turns_deg")) o.turns_deg = numbers(l["turns_deg"], "layout.turns_deg");
    if (l.contains("checkpoints")) {
      if (!l["checkpoints"].is_array()) bad("layout.checkpoints", "expected a list of [x, y, z]");
      o.checkpoints.clear();
      for (const auto& cp : l["checkpoints"]) o.checkpoints.push_back(vec3(cp, "layout.checkpoints"));
    }
    if (l.contains("playspace")) {
      const ojson& p = l["playspace"];
      check_keys(p, "layout.playspace", {"half_extents", "origin"});
      if (p.contains("half_extents")) o.playspace_half_extents = vec2(p["half_extents"], "layout.playspace");
      if (p.contains("origin")) o.playspace_origin = vec2(p["origin"], "layout.playspace");
    }
    read(l, "min_half_extent", o.min_half_extent, "layout");
    if (l.contains("tasks")) {
      const ojson& t = l["tasks"];
      check_keys(t, "layout.tasks", {"items", "pickup", "dropoffs"});
      read(t, "items", o.tasks.items, "layout.tasks");
      if (t.contains("pickup")) o.tasks.pickup = vec2(t["pickup"], "layout.tasks.pickup");
      if (t.contains("dropoffs")) {
        if (!t["dropoffs"].is_array()) bad("layout.tasks.dropoffs", "expected a list of [x, z]");
        o.tasks.dropoffs.clear();
        for (const auto& d : t["dropoffs"]) o.tasks.dropoffs.push_back(vec2(d, "layout.tasks.dropoffs"));
      }
    }
    read(l, "platform_radius", o.platform_radius, "layout");
    read(l, "platform_setback", o.platform_setback, "layout");
    read(l, "rear_margin", o.rear_margin, "layout");
    read(l, "button_reach", o.button_reach, "layout");
    read(l, "nav_margin", o.nav_margin, "layout");
  }
  return c;
}

RunConfig parse_config_yaml(const std::string& text, RunConfig base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::Config, std::string("scenario file: ") + e.what(), e.mark.line + 1);
  }
  if (root.IsNull()) return base;
  return config_from_json(yaml_to_json(root), std::move(base));
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  base.scenario = path;
  RunConfig c = parse_config_yaml(ss.str(), std::move(base));
  c.scenario = path;
  return c;
}

RunConfig resolve_scenario_source(const std::string& source, RunConfig base) {
  if (source == "default:L1" || source == "default:L2") {
    base.scenario = source;
    base.layout = ScenarioLayout{};
    base.layout.level = source == "default:L1" ? Level::L1 : Level::L2;
    return base;
  }
  if (source.rfind("default:", 0) == 0) {
    throw Error(ErrorCode::Config, "unknown built-in scenario '" + source + "' (expected default:L1 or default:L2)");
  }
  return load_config_file(source, std::move(base));
}

}  // namespace tws
