#pragma once

// Runtime technique layer: the tunnel invocation/animation state machine with
// rig parenting at portal crossings, and the point-and-teleport baseline.

#include <cstddef>
#include <optional>
#include <vector>

#include "tws/geometry.hpp"
#include "tws/tunnel.hpp"

namespace tws {

enum class TunnelPhase {
  Idle,
  RisingHalf,
  Extending,
  RisingFull,
  DoorsOpening,
  Open,
  Traversing,
  DoorsClosing,
  Retracting,
};

const char* to_string(TunnelPhase phase);
TunnelPhase next_phase(TunnelPhase phase);
/// Phases that end on their own once their duration elapses.
bool is_timed(TunnelPhase phase);

struct PhaseDurations {
  double rising_half = 0.5;
  double extending = 1.0;
  double rising_full = 0.5;
  double doors_opening = 0.5;
  double doors_closing = 0.5;
  double retracting = 2.0;
  /// Duration multiplier per invocation; the last entry repeats. Empty = 1.0.
  std::vector<double> speed_schedule;

  double base(TunnelPhase phase) const;
  double multiplier(std::size_t invocation) const;
  void validate() const;
};

struct InvocationAnchor {
  Vec3 platform_center;
  double platform_radius = 0.4;
  Vec3 button_position;
  int destination = 0;
};

/// Throws InvalidArgument if the button is farther than `reach` (horizontal)
/// from the platform center.
void validate_anchor(const InvocationAnchor& anchor, double reach = 1.0);

struct TunnelRequest {
  Segment path;
  GainStrategy strategy;
  TunnelParams params;
  PlaySpace playspace;
};

enum class EffectKind { PhaseChange, ParentRigToCabin, UnparentRig, Abort, StartTeardown };

struct Effect {
  EffectKind kind;
  TunnelPhase from = TunnelPhase::Idle;
  TunnelPhase to = TunnelPhase::Idle;
  Vec3 world_position;
};

/// One tick of head motion: world position before the step and the step in
/// world axes (the physical displacement rotated by the rig, unscaled).
struct RigMotion {
  Vec3 world_before;
  Vec3 step;
  /// Scaling driver displacement (center-of-mass driver); defaults to `step`.
  std::optional<Vec3> driver_step;
};

struct TickOutput {
  std::vector<Effect> effects;
  Vec3 world_after;
  /// Fraction of this tick's step walked while parented to the cabin.
  double cabin_fraction = 0.0;
};

/// One state machine per simulated user.
class TunnelController {
 public:
  explicit TunnelController(PhaseDurations durations = {});

  TunnelPhase phase() const { return phase_; }
  double phase_elapsed() const { return elapsed_; }
  const std::optional<TunnelSpec>& spec() const { return spec_; }
  const TraversalState& traversal() const { return traversal_; }
  bool rig_parented() const { return traversal_.parent == RigParent::Cabin; }
  bool exited() const { return exited_; }
  std::size_t invocations() const { return invocations_; }
  /// Current duration of a timed phase, multiplier applied.
  double duration(TunnelPhase phase) const;

  /// User presses the button. Requires the phase to be Idle and the user's
  /// floor position within the platform radius. The cabin entrance is the
  /// path start; its tracking-space pose comes from `tracking_to_world`.
  const TunnelSpec& invoke(const InvocationAnchor& anchor, const Vec3& user_world_floor,
                           const Transform& tracking_to_world, const TunnelRequest& request);

  /// Advances phase timers, then applies the motion (if any) with portal
  /// crossing detection on the head point. Requires dt > 0.
  TickOutput tick(double dt, const std::optional<RigMotion>& motion);

 private:
  void transition(TunnelPhase to, std::vector<Effect>& effects);
  Vec3 move_parented(const Vec3& step, const std::optional<Vec3>& driver, TickOutput& out,
                     double weight);

  PhaseDurations durations_;
  TunnelPhase phase_ = TunnelPhase::Idle;
  double elapsed_ = 0.0;
  double multiplier_ = 1.0;
  std::size_t invocations_ = 0;
  std::optional<TunnelSpec> spec_;
  TraversalState traversal_;
  bool exited_ = false;
  bool aborted_ = false;
};

enum class AimModel { StraightRay, Parabolic };

struct TeleportConfig {
  double max_range = 12.0;
  AimModel aim_model = AimModel::StraightRay;
  double cooldown = 0.0;
  bool clamp_to_range = false;
  double launch_speed = 8.0;
  double gravity = 9.81;
  double ground_height = 0.0;

  void validate() const;
};

/// Ground target for an aim from `origin` along the unit `direction`, or
/// nullopt when the aim is invalid (no ground hit, out of range without
/// clamping, or outside the navigable region).
std::optional<Vec3> teleport_aim(const Pose& origin, const Vec3& direction, const TeleportConfig& cfg,
                                 const NavRegion& nav);

class Teleporter {
 public:
  explicit Teleporter(TeleportConfig cfg = {}) : cfg_(cfg) {}

  bool ready(double now) const { return !last_ || now >= *last_ + cfg_.cooldown; }
  /// Instant relocation; orientation is preserved. Throws CooldownActive.
  Pose execute(const Pose& rig, const Vec3& target, double now);

 private:
  TeleportConfig cfg_;
  std::optional<double> last_;
};

}  // namespace tws
