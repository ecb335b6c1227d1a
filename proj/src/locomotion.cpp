#include "tws/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tws/error.hpp"

namespace tws {

namespace {
constexpr double kTimeEpsilon = 1e-9;
}

const char* to_string(TunnelPhase phase) {
  switch (phase) {
    case TunnelPhase::Idle: return "Idle";
    case TunnelPhase::RisingHalf: return "RisingHalf";
    case TunnelPhase::Extending: return "Extending";
    case TunnelPhase::RisingFull: return "RisingFull";
    case TunnelPhase::DoorsOpening: return "DoorsOpening";
    case TunnelPhase::Open: return "Open";
    case TunnelPhase::Traversing: return "Traversing";
    case TunnelPhase::DoorsClosing: return "DoorsClosing";
    case TunnelPhase::Retracting: return "Retracting";
  }
  return "?";
}

TunnelPhase next_phase(TunnelPhase phase) {
  switch (phase) {
    case TunnelPhase::Idle: return TunnelPhase::RisingHalf;
    case TunnelPhase::RisingHalf: return TunnelPhase::Extending;
    case TunnelPhase::Extending: return TunnelPhase::RisingFull;
    case TunnelPhase::RisingFull: return TunnelPhase::DoorsOpening;
    case TunnelPhase::DoorsOpening: return TunnelPhase::Open;
    case TunnelPhase::Open: return TunnelPhase::Traversing;
    case TunnelPhase::Traversing: return TunnelPhase::DoorsClosing;
    case TunnelPhase::DoorsClosing: return TunnelPhase::Retracting;
    case TunnelPhase::Retracting: return TunnelPhase::Idle;
  }
  return TunnelPhase::Idle;
}

bool is_timed(TunnelPhase phase) {
  switch (phase) {
    case TunnelPhase::RisingHalf:
    case TunnelPhase::Extending:
    case TunnelPhase::RisingFull:
    case TunnelPhase::DoorsOpening:
    case TunnelPhase::DoorsClosing:
    case TunnelPhase::Retracting: return true;
    default: return false;
  }
}

double PhaseDurations::base(TunnelPhase phase) const {
  switch (phase) {
    case TunnelPhase::RisingHalf: return rising_half;
    case TunnelPhase::Extending: return extending;
    case TunnelPhase::RisingFull: return rising_full;
    case TunnelPhase::DoorsOpening: return doors_opening;
    case TunnelPhase::DoorsClosing: return doors_closing;
    case TunnelPhase::Retracting: return retracting;
    default: return 0.0;
  }
}

double PhaseDurations::multiplier(std::size_t invocation) const {
  if (speed_schedule.empty()) return 1.0;
  return speed_schedule[std::min(invocation, speed_schedule.size() - 1)];
}

void PhaseDurations::validate() const {
  for (double d : {rising_half, extending, rising_full, doors_opening, doors_closing, retracting}) {
    if (!(d >= 0.0)) throw Error(ErrorCode::InvalidArgument, "phase durations must be >= 0");
  }
  for (double m : speed_schedule) {
    if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "speed schedule multipliers must be > 0");
  }
}

void validate_anchor(const InvocationAnchor& anchor, double reach) {
  if (!(anchor.platform_radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "platform radius must be > 0");
  if (norm(floor_of(anchor.button_position - anchor.platform_center)) > reach) {
    throw Error(ErrorCode::InvalidArgument, "button is out of reach from the platform");
  }
}

TunnelController::TunnelController(PhaseDurations durations) : durations_(std::move(durations)) {
  durations_.validate();
}

double TunnelController::duration(TunnelPhase phase) const { return durations_.base(phase) * multiplier_; }

const TunnelSpec& TunnelController::invoke(const InvocationAnchor& anchor, const Vec3& user_world_floor,
                                           const Transform& tracking_to_world, const TunnelRequest& request) {
  if (phase_ != TunnelPhase::Idle) {
    throw Error(ErrorCode::TunnelAlreadyActive, std::string("tunnel is active (phase ") + to_string(phase_) + ")");
  }
  const double off = norm(floor_of(user_world_floor - anchor.platform_center));
  if (off > anchor.platform_radius) {
    throw Error(ErrorCode::NotOnPlatform, "user is " + std::to_string(off) + " m from the platform center");
  }
  const Pose entry{tracking_to_world.inverse().apply_point(request.path.start()), Quat::identity()};
  TunnelParams params = request.params;
  params.tracking_to_world = tracking_to_world.rotation;
  TunnelSpec spec = tunnel_build(request.path, request.strategy, params, request.playspace, entry);

  spec_ = std::move(spec);
  traversal_ = {};
  exited_ = false;
  aborted_ = false;
  multiplier_ = durations_.multiplier(invocations_);
  ++invocations_;
  phase_ = TunnelPhase::RisingHalf;
  elapsed_ = 0.0;
  return *spec_;
}

void TunnelController::transition(TunnelPhase to, std::vector<Effect>& effects) {
  effects.push_back({EffectKind::PhaseChange, phase_, to, {}});
  phase_ = to;
  if (phase_ == TunnelPhase::Idle) {
    spec_.reset();
    traversal_ = {};
  }
}

Vec3 TunnelController::move_parented(const Vec3& step, const std::optional<Vec3>& driver,
                                     TickOutput& out, double weight) {
  const TunnelSpec& spec = *spec_;
  const double forward = driver ? dot(*driver, spec.axis) : dot(step, spec.axis);
  const double x = traversal_.x;
  const bool exits = forward > 0.0 && x + forward >= spec.cabin_length;
  const bool aborts = forward < 0.0 && x + forward <= 0.0;
  if (!exits && !aborts) {
    const auto upd = advance_traversal(traversal_, spec, step, driver ? std::optional(forward) : std::nullopt);
    traversal_ = upd.state;
    out.cabin_fraction += weight;
    return upd.world_position;
  }

  // Split at the portal plane: the inside part is scaled, the rest is 1:1.
  const double boundary = exits ? spec.cabin_length : 0.0;
  const double f = (boundary - x) / forward;
  auto upd = advance_traversal(traversal_, spec, step * f, driver ? std::optional(forward * f) : std::nullopt);
  upd.state.x = boundary;
  upd.state.cabin_offset = (spec.gain - 1.0) * boundary;
  traversal_ = upd.state;
  const Vec3 crossing = traversal_world_position(spec, traversal_);
  traversal_.parent = RigParent::World;
  out.cabin_fraction += weight * f;
  if (exits) {
    exited_ = true;
  } else {
    aborted_ = true;
    out.effects.push_back({EffectKind::Abort, phase_, phase_, crossing});
  }
  out.effects.push_back({EffectKind::UnparentRig, phase_, phase_, crossing});
  return crossing + step * (1.0 - f);
}

TickOutput TunnelController::tick(double dt, const std::optional<RigMotion>& motion) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be > 0");
  TickOutput out;

  elapsed_ += dt;
  while (is_timed(phase_) && elapsed_ >= duration(phase_) - kTimeEpsilon) {
    elapsed_ = std::max(0.0, elapsed_ - duration(phase_));
    transition(next_phase(phase_), out.effects);
  }

  if (!motion) return out;
  Vec3 pos = motion->world_before;
  const Vec3& step = motion->step;

  if (rig_parented()) {
    pos = move_parented(step, motion->driver_step, out, 1.0);
  } else if (spec_ && !exited_ && (phase_ == TunnelPhase::Open || phase_ == TunnelPhase::Traversing)) {
    const TunnelSpec& spec = *spec_;
    const double s0 = dot(pos - spec.path.start(), spec.axis);
    const double s1 = s0 + dot(step, spec.axis);
    bool crossed = false;
    if (s0 < 0.0 && s1 >= 0.0) {
      const double f = -s0 / (s1 - s0);
      const Vec3 at = pos + step * f;
      const Vec3 rel = at - spec.path.start();
      const double up = dot(rel, spec.up);
      if (std::abs(dot(rel, spec.side)) <= spec.width * 0.5 && up >= 0.0 && up <= spec.height) {
        crossed = true;
        traversal_ = enter_cabin(spec, at);
        aborted_ = false;
        out.effects.push_back({EffectKind::ParentRigToCabin, phase_, phase_, at});
        if (phase_ == TunnelPhase::Open) {
          elapsed_ = 0.0;
          transition(TunnelPhase::Traversing, out.effects);
        }
        const std::optional<Vec3> rest_driver =
            motion->driver_step ? std::optional(*motion->driver_step * (1.0 - f)) : std::nullopt;
        pos = move_parented(step * (1.0 - f), rest_driver, out, 1.0 - f);
      }
    }
    if (!crossed) pos = pos + step;
  } else {
    pos = pos + step;
  }

  if (phase_ == TunnelPhase::Traversing && !rig_parented() && spec_) {
    const TunnelSpec& spec = *spec_;
    const bool clear_far = exited_ && dot(pos - spec.path.end(), spec.axis) >= spec.body_radius;
    const bool clear_near = aborted_ && dot(spec.path.start() - pos, spec.axis) >= spec.body_radius;
    if (clear_far || clear_near) {
      out.effects.push_back({EffectKind::StartTeardown, phase_, phase_, pos});
      elapsed_ = 0.0;
      transition(TunnelPhase::DoorsClosing, out.effects);
    }
  }
  out.world_after = pos;
  return out;
}

void TeleportConfig::validate() const {
  if (!(max_range > 0.0)) throw Error(ErrorCode::InvalidArgument, "teleport max_range must be > 0");
  if (!(cooldown >= 0.0)) throw Error(ErrorCode::InvalidArgument, "teleport cooldown must be >= 0");
  if (aim_model == AimModel::Parabolic && (!(launch_speed > 0.0) || !(gravity > 0.0))) {
    throw Error(ErrorCode::InvalidArgument, "parabolic aim needs positive launch speed and gravity");
  }
}

std::optional<Vec3> teleport_aim(const Pose& origin, const Vec3& direction, const TeleportConfig& cfg,
                                 const NavRegion& nav) {
  if (std::abs(norm(direction) - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "aim direction must be unit length");
  }
  const Vec3& o = origin.position;
  const double height = o.y - cfg.ground_height;
  Vec3 hit;
  if (cfg.aim_model == AimModel::StraightRay) {
    if (!(direction.y < 0.0) || height < 0.0) return std::nullopt;
    hit = o + direction * (-height / direction.y);
  } else {
    const Vec3 v = direction * cfg.launch_speed;
    const double disc = v.y * v.y + 2.0 * cfg.gravity * height;
    if (disc < 0.0) return std::nullopt;
    const double t = (v.y + std::sqrt(disc)) / cfg.gravity;
    if (!(t > 0.0)) return std::nullopt;
    hit = {o.x + v.x * t, cfg.ground_height, o.z + v.z * t};
  }
  hit.y = cfg.ground_height;

  const Vec2 base = floor_of(o);
  const Vec2 reach = floor_of(hit) - base;
  const double range = norm(reach);
  if (range > cfg.max_range) {
    if (!cfg.clamp_to_range) return std::nullopt;
    hit = from_floor(base + reach * (cfg.max_range / range), cfg.ground_height);
  }
  if (!nav.contains(floor_of(hit))) return std::nullopt;
  return hit;
}

Pose Teleporter::execute(const Pose& rig, const Vec3& target, double now) {
  if (!ready(now)) throw Error(ErrorCode::CooldownActive, "teleport is cooling down");
  last_ = now;
  return {target, rig.orientation};
}

}  // namespace tws
