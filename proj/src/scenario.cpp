#include "tws/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include "tws/error.hpp"

namespace tws {

namespace {

constexpr double kHeightTolerance = 1e-9;

nlohmann::ordered_json vec_json(const Vec3& v) { return {v.x, v.y, v.z}; }
nlohmann::ordered_json vec_json(const Vec2& v) { return {v.x, v.y}; }

Vec2 perpendicular(const Vec2& d) { return {-d.y, d.x}; }

Vec2 unit_floor(const Vec3& v) {
  const Vec2 f = floor_of(v);
  const double n = norm(f);
  return {f.x / n, f.y / n};
}

}  // namespace

const char* to_string(Level level) { return level == Level::L1 ? "L1" : "L2"; }
const char* to_string(Technique technique) { return technique == Technique::Tunnel ? "tunnel" : "teleport"; }

Level parse_level(const std::string& text) {
  if (text == "L1") return Level::L1;
  if (text == "L2") return Level::L2;
  throw Error(ErrorCode::Config, "unknown level '" + text + "' (expected L1 or L2)");
}

Technique parse_technique(const std::string& text) {
  if (text == "tunnel") return Technique::Tunnel;
  if (text == "teleport") return Technique::Teleport;
  throw Error(ErrorCode::Config, "unknown technique '" + text + "' (expected tunnel or teleport)");
}

const char* to_string(IntentKind kind) {
  switch (kind) {
    case IntentKind::PressButton: return "PressButton";
    case IntentKind::AimTeleport: return "AimTeleport";
    case IntentKind::ExecuteTeleport: return "ExecuteTeleport";
    case IntentKind::TaskPickup: return "TaskPickup";
    case IntentKind::TaskDrop: return "TaskDrop";
    case IntentKind::CheckpointComplete: return "CheckpointComplete";
    case IntentKind::LegStart: return "LegStart";
    case IntentKind::LegEnd: return "LegEnd";
    case IntentKind::Finish: return "Finish";
  }
  return "?";
}

double Scenario::total_length() const {
  double sum = 0.0;
  for (const auto& p : paths) sum += p.length();
  return sum;
}

Vec3 heading_vector(double degrees) {
  // Right angles are exact so axis-aligned routes keep exact lengths.
  const double quarter = degrees / 90.0;
  if (quarter == std::round(quarter)) {
    static constexpr Vec3 kAxes[] = {{1.0, 0.0, 0.0}, {0.0, 0.0, -1.0}, {-1.0, 0.0, 0.0}, {0.0, 0.0, 1.0}};
    const long long q = static_cast<long long>(quarter);
    return kAxes[((q % 4) + 4) % 4];
  }
  const double r = degrees * std::numbers::pi / 180.0;
  return {std::cos(r), 0.0, -std::sin(r)};
}

Scenario build_scenario(const ScenarioLayout& layout) {
  if (layout.playspace_half_extents.x < layout.min_half_extent ||
      layout.playspace_half_extents.y < layout.min_half_extent) {
    throw Error(ErrorCode::PlayspaceTooSmall,
                "playspace must be at least " + std::to_string(2.0 * layout.min_half_extent) + " m on each side");
  }
  if (!(layout.platform_radius > 0.0) || layout.platform_setback < 0.0 || layout.rear_margin < 0.0 ||
      layout.nav_margin < 0.0) {
    throw Error(ErrorCode::Config, "platform and navigation distances must be non-negative");
  }

  Scenario sc;
  sc.layout = layout;
  sc.level_id = to_string(layout.level);
  sc.task_name = layout.level == Level::L1 ? "energy-cells" : "garbage-bags";
  sc.playspace = PlaySpace(layout.playspace_half_extents, layout.playspace_origin);

  if (!layout.checkpoints.empty()) {
    sc.checkpoints = layout.checkpoints;
  } else {
    if (layout.turns_deg.size() + 1 != layout.lengths.size()) {
      throw Error(ErrorCode::Config, "route needs exactly one turn between consecutive legs");
    }
    Vec3 p = layout.start;
    double heading = layout.heading_deg;
    sc.checkpoints.push_back(p);
    for (std::size_t i = 0; i < layout.lengths.size(); ++i) {
      if (!(layout.lengths[i] > 0.0)) throw Error(ErrorCode::Config, "leg lengths must be positive");
      if (i > 0) heading += layout.turns_deg[i - 1];
      p = p + heading_vector(heading) * layout.lengths[i];
      sc.checkpoints.push_back(p);
    }
  }
  if (sc.checkpoints.size() < 2) throw Error(ErrorCode::Config, "a scenario needs at least two checkpoints");

  const TaskLayout& task = layout.tasks;
  if (task.items < 0 || task.items > 3) throw Error(ErrorCode::Config, "items per checkpoint must be in [0, 3]");
  if (task.items > 0 && task.dropoffs.empty()) throw Error(ErrorCode::Config, "tasks need at least one dropoff");
  if (!sc.playspace.contains(task.pickup)) throw Error(ErrorCode::Config, "pickup lies outside the playspace");
  for (const Vec2& d : task.dropoffs) {
    if (!sc.playspace.contains(d)) throw Error(ErrorCode::Config, "dropoff lies outside the playspace");
  }

  for (std::size_t i = 0; i + 1 < sc.checkpoints.size(); ++i) {
    const Vec3& a = sc.checkpoints[i];
    const Vec3& b = sc.checkpoints[i + 1];
    if (std::abs(a.y - b.y) > kHeightTolerance) {
      throw Error(ErrorCode::NonHorizontalPath, "path " + std::to_string(i) + " is not horizontal");
    }
    sc.paths.emplace_back(a, b);
    const Vec2 axis = unit_floor(sc.paths.back().direction());

    const Vec2 origin = sc.playspace.origin();
    const double back = sc.playspace.distance_to_boundary(origin, axis * -1.0);
    const Vec2 entrance = origin - axis * (back - layout.rear_margin);
    const Vec2 platform = entrance - axis * layout.platform_setback;
    if (!sc.playspace.contains(platform)) {
      throw Error(ErrorCode::Config, "departure platform lies outside the playspace");
    }
    sc.departures.push_back(entrance);
    InvocationAnchor anchor{from_floor(platform), layout.platform_radius, from_floor(platform + axis * 0.5, 1.0),
                            static_cast<int>(i + 1)};
    validate_anchor(anchor, layout.button_reach);
    sc.anchors.push_back(anchor);

    const double m = layout.nav_margin;
    sc.navigable.rects.push_back(
        {{std::min(a.x, b.x) - m, std::min(a.z, b.z) - m}, {std::max(a.x, b.x) + m, std::max(a.z, b.z) + m}});
  }
  sc.tasks.assign(sc.checkpoints.size(), task);
  return sc;
}

Scenario build_default_scenario(Level level, const PlaySpace& playspace) {
  ScenarioLayout layout;
  layout.level = level;
  layout.playspace_half_extents = playspace.half_extents();
  layout.playspace_origin = playspace.origin();
  return build_scenario(layout);
}

std::vector<double> turning_angles(const Scenario& scenario) {
  std::vector<double> out;
  for (std::size_t i = 1; i < scenario.paths.size(); ++i) {
    const Vec3 a = scenario.paths[i - 1].direction();
    const Vec3 b = scenario.paths[i].direction();
    // Counter-clockwise seen from above is positive.
    const double s = dot(cross(a, b), kUp);
    out.push_back(std::atan2(s, dot(a, b)) * 180.0 / std::numbers::pi);
  }
  return out;
}

std::string canonical_geometry(const Scenario& sc) {
  nlohmann::ordered_json j;
  j["checkpoints"] = nlohmann::ordered_json::array();
  for (const auto& c : sc.checkpoints) j["checkpoints"].push_back(vec_json(c));
  j["playspace"] = {{"half_extents", vec_json(sc.playspace.half_extents())},
                    {"origin", vec_json(sc.playspace.origin())}};
  j["departures"] = nlohmann::ordered_json::array();
  for (const auto& d : sc.departures) j["departures"].push_back(vec_json(d));
  j["anchors"] = nlohmann::ordered_json::array();
  for (const auto& a : sc.anchors) {
    j["anchors"].push_back({{"platform", vec_json(a.platform_center)},
                            {"radius", a.platform_radius},
                            {"button", vec_json(a.button_position)},
                            {"destination", a.destination}});
  }
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : sc.tasks) {
    nlohmann::ordered_json drops = nlohmann::ordered_json::array();
    for (const auto& d : t.dropoffs) drops.push_back(vec_json(d));
    j["tasks"].push_back({{"items", t.items}, {"pickup", vec_json(t.pickup)}, {"dropoffs", drops}});
  }
  j["navigable"] = nlohmann::ordered_json::array();
  for (const auto& r : sc.navigable.rects) j["navigable"].push_back({vec_json(r.min), vec_json(r.max)});
  return j.dump();
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xf];
  return out;
}

std::string scenario_hash(const Scenario& scenario) { return digest_hex(canonical_geometry(scenario)); }

void AgentProfile::validate() const {
  if (!(walk_speed > 0.0)) throw Error(ErrorCode::Config, "walk speed must be > 0");
  if (!(step_cadence >= 0.0)) throw Error(ErrorCode::Config, "step cadence must be >= 0");
  if (!(bob_vertical >= 0.0) || !(bob_lateral >= 0.0)) throw Error(ErrorCode::Config, "bob amplitudes must be >= 0");
  if (!(task_time_per_item >= 0.0)) throw Error(ErrorCode::Config, "task time must be >= 0");
  if (!(teleport_threshold >= 0.0)) throw Error(ErrorCode::Config, "teleport threshold must be >= 0");
  if (!(eye_height > 0.0)) throw Error(ErrorCode::Config, "eye height must be > 0");
  if (!(aim_time >= 0.0)) throw Error(ErrorCode::Config, "aim time must be >= 0");
  if (!(hop_fraction > 0.0 && hop_fraction <= 1.0)) throw Error(ErrorCode::Config, "hop fraction must be in (0, 1]");
  if (!(arrival_tolerance > 0.0)) throw Error(ErrorCode::Config, "arrival tolerance must be > 0");
  if (!(exit_overshoot >= 0.0)) throw Error(ErrorCode::Config, "exit overshoot must be >= 0");
  if (!(jitter >= 0.0)) throw Error(ErrorCode::Config, "jitter must be >= 0");
}

double teleport_reach(const TeleportConfig& cfg, double launch_height) {
  if (cfg.aim_model == AimModel::StraightRay) return cfg.max_range;
  const double v = cfg.launch_speed;
  const double ballistic = v / cfg.gravity * std::sqrt(v * v + 2.0 * cfg.gravity * launch_height);
  return std::min(cfg.max_range, ballistic);
}

std::optional<Vec3> aim_direction(const Vec3& origin, const Vec3& target, const TeleportConfig& cfg) {
  const Vec3 rel = target - origin;
  if (cfg.aim_model == AimModel::StraightRay) {
    if (!(rel.y < 0.0)) return std::nullopt;
    return normalized(rel);
  }
  const double dist = norm(floor_of(rel));
  if (dist == 0.0) return Vec3{0.0, -1.0, 0.0};
  const double v2 = cfg.launch_speed * cfg.launch_speed;
  const double g = cfg.gravity;
  const double disc = v2 * v2 - g * (g * dist * dist + 2.0 * rel.y * v2);
  if (disc < 0.0) return std::nullopt;
  const double pitch = std::atan((v2 - std::sqrt(disc)) / (g * dist));
  const Vec3 flat{rel.x / dist, 0.0, rel.z / dist};
  return normalized(flat * std::cos(pitch) + kUp * std::sin(pitch));
}

Agent::Agent(const AgentProfile& profile, const Scenario& scenario, Technique technique,
             const TeleportConfig& teleport, std::uint64_t seed)
    : profile_(profile), scenario_(&scenario), technique_(technique), teleport_(teleport), rng_(seed) {
  profile_.validate();
  hop_ = profile_.hop_fraction * teleport_reach(teleport_, profile_.eye_height - teleport_.ground_height);
  floor_ = scenario.playspace.origin();
  for (int k = 0; k < static_cast<int>(scenario.checkpoints.size()); ++k) plan_checkpoint(k);
  plan_.push_back({Act::Instant, {}, 0.0, {IntentKind::Finish}});
}

void Agent::plan_checkpoint(int k) {
  const TaskLayout& task = scenario_->tasks[static_cast<std::size_t>(k)];
  const double half = profile_.task_time_per_item * 0.5;
  for (int i = 0; i < task.items; ++i) {
    plan_.push_back({Act::Walk, task.pickup});
    plan_.push_back({Act::Instant, {}, 0.0, {IntentKind::TaskPickup, k, 0, i}});
    plan_.push_back({Act::Wait, {}, half});
    plan_.push_back({Act::Walk, task.dropoffs[static_cast<std::size_t>(i) % task.dropoffs.size()]});
    plan_.push_back({Act::Instant, {}, 0.0, {IntentKind::TaskDrop, k, 0, i}});
    plan_.push_back({Act::Wait, {}, half});
  }
  plan_.push_back({Act::Instant, {}, 0.0, {IntentKind::CheckpointComplete, k}});
  if (k + 1 >= static_cast<int>(scenario_->checkpoints.size())) return;

  plan_.push_back({Act::Instant, {}, 0.0, {IntentKind::LegStart, k + 1, k}});
  if (technique_ == Technique::Tunnel) {
    plan_.push_back({Act::Walk, floor_of(scenario_->anchors[static_cast<std::size_t>(k)].platform_center)});
    plan_.push_back({Act::AwaitIdle});
    plan_.push_back({Act::Instant, {}, 0.0, {IntentKind::PressButton, k + 1, k}});
    plan_.push_back({Act::AwaitOpen});
    plan_.push_back({Act::CrossTunnel});
  } else {
    plan_.push_back({Act::TeleportLeg});
  }
}

Vec3 Agent::head() const {
  const double tau = walk_clock_;
  const double f = profile_.step_cadence;
  const double vertical = profile_.bob_vertical * std::sin(2.0 * std::numbers::pi * f * tau);
  const double lateral = profile_.bob_lateral * std::sin(std::numbers::pi * f * tau);
  return from_floor(floor_ + lateral_dir_ * lateral, profile_.eye_height + vertical);
}

std::optional<AgentMotion> Agent::move(double dt) {
  if (plan_.empty()) return std::nullopt;
  const Action& a = plan_.front();
  if (!a.started || (a.act != Act::Walk && a.act != Act::CrossTunnel) || walk_done_) return std::nullopt;

  AgentMotion m;
  m.floor_before = floor();
  m.head_before = head();
  const Vec2 rem = a.target - floor_;
  const double dist = norm(rem);
  const double reach = profile_.walk_speed * dt;
  Vec2 step;
  double moved;
  if (dist <= reach) {
    step = rem;
    moved = dist;
    walk_done_ = true;
  } else {
    step = rem * (reach / dist);
    moved = reach;
  }
  if (dist > 0.0) lateral_dir_ = perpendicular(rem * (1.0 / dist));
  if (profile_.jitter > 0.0 && !walk_done_) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    step = step + lateral_dir_ * (profile_.jitter * u);
  }
  floor_ = floor_ + step;
  walk_clock_ += moved / profile_.walk_speed;
  m.floor_after = floor();
  m.head_after = head();
  return m;
}

std::vector<Intent> Agent::settle(const AgentView& view, double rate) {
  std::vector<Intent> out;
  while (!plan_.empty()) {
    Action& a = plan_.front();
    if (!a.started) {
      a.started = true;
      switch (a.act) {
        case Act::Instant:
          if (a.intent.kind == IntentKind::LegStart) {
            leg_ = a.intent.leg;
            const Segment& path = scenario_->paths[static_cast<std::size_t>(leg_)];
            leg_goal_ = view.rig_translation + from_floor(scenario_->departures[static_cast<std::size_t>(leg_)]) +
                        path.direction() * path.length();
          }
          out.push_back(a.intent);
          plan_.pop_front();
          return out;
        case Act::Wait: a.end_tick = view.tick + std::llround(a.seconds * rate); break;
        case Act::CrossTunnel: {
          const std::size_t k = static_cast<std::size_t>(leg_);
          const Vec2 axis = unit_floor(scenario_->paths[k].direction());
          a.target = scenario_->departures[k] + axis * (view.cabin_length + profile_.exit_overshoot);
          walk_done_ = false;
          break;
        }
        case Act::Walk: walk_done_ = norm(a.target - floor_) == 0.0; break;
        case Act::TeleportLeg: {
          const Vec3 here = view.rig_translation + floor();
          const Vec2 rem = floor_of(leg_goal_ - here);
          const double dist = norm(rem);
          plan_.pop_front();
          if (dist <= profile_.arrival_tolerance) {
            out.push_back({IntentKind::LegEnd, leg_ + 1, leg_});
            return out;
          }
          if (dist > profile_.teleport_threshold) {
            const double hop = std::min(dist, hop_);
            const Vec3 target = dist <= hop_ ? leg_goal_ : here + from_floor(rem * (hop / dist));
            Intent aim{IntentKind::AimTeleport, leg_ + 1, leg_};
            aim.target = {target.x, teleport_.ground_height, target.z};
            plan_.push_front({Act::TeleportLeg});
            plan_.push_front({Act::Instant, {}, 0.0, {IntentKind::ExecuteTeleport, leg_ + 1, leg_}});
            plan_.push_front({Act::Wait, {}, profile_.aim_time});
            plan_.push_front({Act::Instant, {}, 0.0, aim});
          } else {
            plan_.push_front({Act::TeleportLeg});
            plan_.push_front({Act::Walk, floor_of(leg_goal_ - view.rig_translation)});
          }
          continue;
        }
        default: break;
      }
    }
    bool done = false;
    switch (a.act) {
      case Act::Walk:
      case Act::CrossTunnel: done = walk_done_; break;
      case Act::Wait: done = view.tick >= a.end_tick; break;
      case Act::AwaitIdle: done = view.phase == TunnelPhase::Idle; break;
      case Act::AwaitOpen: done = view.phase == TunnelPhase::Open || view.phase == TunnelPhase::Traversing; break;
      default: done = true; break;
    }
    if (!done) break;
    if (a.act == Act::Walk || a.act == Act::CrossTunnel) walk_done_ = false;
    plan_.pop_front();
  }
  return out;
}

}  // namespace tws
