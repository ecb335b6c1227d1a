#pragma once

// Testbed world model and the scripted agent that stands in for a participant.
//
// Checkpoint areas are tracking-space layouts: wherever the rig is when the
// agent arrives, the area's pickup, dropoffs and departure platform sit at the
// same physical spots. Each leg is the canonical path translated so that it
// starts at the departure point of the current area.

#include <cstdint>
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tws/geometry.hpp"
#include "tws/locomotion.hpp"
#include "tws/tunnel.hpp"

namespace tws {

enum class Level { L1, L2 };
enum class Technique { Tunnel, Teleport };

const char* to_string(Level level);
const char* to_string(Technique technique);
Level parse_level(const std::string& text);
Technique parse_technique(const std::string& text);

struct TaskLayout {
  int items = 3;
  Vec2 pickup{-0.5, -0.5};
  std::vector<Vec2> dropoffs{{1.0, -0.5}, {-0.5, 1.5}, {1.0, 1.5}};
};

struct ScenarioLayout {
  Level level = Level::L1;
  /// Polyline: start point, initial heading (degrees, counter-clockwise from
  /// +x seen from above), leg lengths and the turn before each later leg.
  Vec3 start{};
  double heading_deg = 0.0;
  std::vector<double> lengths{60.0, 75.0, 45.0, 75.0, 45.0, 60.0};
  std::vector<double> turns_deg{90.0, -90.0, 90.0, -90.0, 90.0};
  /// Explicit checkpoints; when non-empty they replace the polyline.
  std::vector<Vec3> checkpoints;

  Vec2 playspace_half_extents{2.0, 2.0};
  Vec2 playspace_origin{};
  double min_half_extent = 2.0;

  TaskLayout tasks;
  double platform_radius = 0.4;
  /// Platform center sits this far behind the cabin entrance.
  double platform_setback = 0.5;
  /// Cabin entrance distance from the rear playspace boundary.
  double rear_margin = 0.7;
  double button_reach = 1.0;
  double nav_margin = 25.0;
};

struct Scenario {
  ScenarioLayout layout;
  std::string level_id;
  std::string task_name;
  std::vector<Vec3> checkpoints;
  std::vector<Segment> paths;
  /// Tracking-space departure data per path.
  std::vector<Vec2> departures;
  std::vector<InvocationAnchor> anchors;
  /// Per checkpoint, tracking-space.
  std::vector<TaskLayout> tasks;
  NavRegion navigable;
  PlaySpace playspace{{2.0, 2.0}};

  std::size_t leg_count() const { return paths.size(); }
  double total_length() const;
};

/// Throws PlayspaceTooSmall, Config (bad layout) or the geometry errors.
Scenario build_scenario(const ScenarioLayout& layout);
Scenario build_default_scenario(Level level, const PlaySpace& playspace);

/// Unit floor-plane heading for a yaw in degrees.
Vec3 heading_vector(double degrees);
/// Turning angles (degrees, signed) between consecutive paths.
std::vector<double> turning_angles(const Scenario& scenario);

/// Canonical geometry-only serialization (level and task names excluded).
std::string canonical_geometry(const Scenario& scenario);
/// FNV-1a 64 digest, hex.
std::string digest_hex(const std::string& bytes);
std::uint64_t fnv1a64(const std::string& bytes);
std::string scenario_hash(const Scenario& scenario);

struct AgentProfile {
  double walk_speed = 1.0;
  double step_cadence = 1.8;
  double bob_vertical = 0.025;
  double bob_lateral = 0.015;
  double task_time_per_item = 15.0;
  /// Teleport policy: teleport while the goal is farther than this.
  double teleport_threshold = 0.0;
  double eye_height = 1.7;
  double aim_time = 1.0;
  /// Hop length as a fraction of the reachable teleport range.
  double hop_fraction = 0.9;
  double arrival_tolerance = 0.01;
  /// Distance walked past the cabin exit before stopping.
  double exit_overshoot = 0.3;
  /// Per-tick lateral jitter amplitude (meters). Zero disables the generator.
  double jitter = 0.0;

  void validate() const;
};

enum class IntentKind {
  PressButton,
  AimTeleport,
  ExecuteTeleport,
  TaskPickup,
  TaskDrop,
  CheckpointComplete,
  LegStart,
  LegEnd,
  Finish,
};

const char* to_string(IntentKind kind);

struct Intent {
  IntentKind kind;
  int checkpoint = 0;
  int leg = 0;
  int item = 0;
  /// AimTeleport: desired ground point (world).
  Vec3 target{};
};

/// What the agent can observe at the end of a tick.
struct AgentView {
  std::int64_t tick = 0;
  Vec3 rig_translation{};
  TunnelPhase phase = TunnelPhase::Idle;
  bool parented = false;
  bool tunnel_exited = false;
  /// Cabin length of the active tunnel, 0 if none.
  double cabin_length = 0.0;
};

struct AgentMotion {
  Vec3 floor_before, floor_after;  // tracking space
  Vec3 head_before, head_after;    // tracking space
};

class Agent {
 public:
  Agent(const AgentProfile& profile, const Scenario& scenario, Technique technique, const TeleportConfig& teleport,
        std::uint64_t seed);

  /// Physical floor point and head (tracking space).
  Vec3 floor() const { return from_floor(floor_); }
  Vec3 head() const;
  bool finished() const { return plan_.empty(); }
  /// Teleport hop length the agent aims for.
  double hop_length() const { return hop_; }

  /// Movement for this tick, if the current action walks.
  std::optional<AgentMotion> move(double dt);
  /// After the tick: completes finished actions and returns the next
  /// instantaneous intent, if any. Call again (with a fresh view) until it
  /// returns nothing.
  std::vector<Intent> settle(const AgentView& view, double rate);

 private:
  enum class Act { Walk, Wait, Instant, AwaitIdle, AwaitOpen, CrossTunnel, TeleportLeg };
  struct Action {
    Act act;
    Vec2 target{};
    double seconds = 0.0;
    Intent intent{IntentKind::Finish};
    std::int64_t end_tick = -1;
    bool started = false;
  };

  void plan_checkpoint(int k);

  AgentProfile profile_;
  const Scenario* scenario_;
  Technique technique_;
  TeleportConfig teleport_;
  std::mt19937_64 rng_;
  double hop_ = 0.0;

  std::deque<Action> plan_;
  Vec2 floor_;
  double walk_clock_ = 0.0;
  Vec2 lateral_dir_{0.0, 1.0};
  bool walk_done_ = false;
  int leg_ = 0;
  Vec3 leg_goal_{};
};

/// Launch direction that reaches `target` from `origin`, for the aim model.
std::optional<Vec3> aim_direction(const Vec3& origin, const Vec3& target, const TeleportConfig& cfg);
/// Farthest horizontal reach from a launch height above the ground.
double teleport_reach(const TeleportConfig& cfg, double launch_height);

}  // namespace tws
