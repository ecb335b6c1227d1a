#include "tws/tunnel.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "tws/error.hpp"

namespace tws {

namespace {

constexpr double kHeightTolerance = 1e-9;
constexpr double kContainTolerance = 1e-9;

Quat quat_from_basis(const Vec3& cx, const Vec3& cy, const Vec3& cz) {
  // Columns of the rotation matrix are the images of the local axes.
  const double m00 = cx.x, m01 = cy.x, m02 = cz.x;
  const double m10 = cx.y, m11 = cy.y, m12 = cz.y;
  const double m20 = cx.z, m21 = cy.z, m22 = cz.z;
  const double trace = m00 + m11 + m22;
  Quat q;
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    q = {0.25 * s, (m21 - m12) / s, (m02 - m20) / s, (m10 - m01) / s};
  } else if (m00 > m11 && m00 > m22) {
    const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
    q = {(m21 - m12) / s, 0.25 * s, (m01 + m10) / s, (m02 + m20) / s};
  } else if (m11 > m22) {
    const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
    q = {(m02 - m20) / s, (m01 + m10) / s, 0.25 * s, (m12 + m21) / s};
  } else {
    const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
    q = {(m10 - m01) / s, (m02 + m20) / s, (m12 + m21) / s, 0.25 * s};
  }
  return q.normalized();
}

}  // namespace

double WindowLayout::coverage_ratio(double wall_height) const {
  if (stripe_count <= 0 || stripe_height <= 0.0) return 0.0;
  return std::clamp(stripe_count * stripe_height / wall_height, 0.0, 1.0);
}

bool WindowLayout::is_window_height(double h) const {
  if (stripe_count <= 0 || stripe_height <= 0.0) return false;
  for (int i = 0; i < stripe_count; ++i) {
    const double lo = sill_height + i * (stripe_height + stripe_spacing);
    if (h >= lo && h <= lo + stripe_height) return true;
  }
  return false;
}

void WindowLayout::validate(double wall_height) const {
  if (stripe_count < 0 || stripe_height < 0.0 || stripe_spacing < 0.0 || sill_height < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "window layout values must be non-negative");
  }
  if (stripe_count == 0) return;
  const double top = stripe_count * stripe_height + (stripe_count - 1) * stripe_spacing + sill_height;
  if (top > wall_height + kHeightTolerance) {
    throw Error(ErrorCode::InvalidArgument, "window stripes (top at " + std::to_string(top) +
                                                " m) exceed the cabin wall height " + std::to_string(wall_height));
  }
}

WindowLayout WindowLayout::centered_bands(int count, double coverage, double wall_height) {
  if (count <= 0 || coverage < 0.0 || coverage > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "centered bands need count > 0 and coverage in [0, 1]");
  }
  const double pitch = wall_height / count;
  const double h = coverage * pitch;
  return WindowLayout{count, h, pitch - h, 0.5 * (pitch - h)};
}

Quat TunnelSpec::cabin_rotation() const { return quat_from_basis(axis, up, side); }

void cabin_basis(const Vec3& axis, Vec3& up, Vec3& side) {
  const double along = dot(kUp, axis);
  const Vec3 ref = std::abs(along) > 1.0 - 1e-12 ? Vec3{1.0, 0.0, 0.0} : kUp;
  up = normalized(ref - axis * dot(ref, axis));
  side = cross(axis, up);
}

TunnelSpec make_tunnel(const Segment& path, double gain, const TunnelParams& params) {
  if (!(gain >= 1.0)) throw Error(ErrorCode::GainBelowOne, "gain must be >= 1");
  if (!(params.width > 0.0) || !(params.height > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "cabin width and height must be positive");
  }
  params.windows.validate(params.height);

  const double d = path.length();
  TunnelSpec spec{.path = path};
  spec.gain = gain;
  spec.hull_length = d;
  spec.cabin_length = d / gain;
  spec.width = params.width;
  spec.height = params.height;
  spec.axis = path.direction();
  cabin_basis(spec.axis, spec.up, spec.side);
  spec.windows = params.windows;
  spec.coverage_ratio = params.windows.coverage_ratio(params.height);
  spec.body_radius = params.body_radius;

  const Vec2 face_half{params.width * 0.5, params.height * 0.5};
  const Quat rot = spec.cabin_rotation();
  spec.portals.entry_surface = {{0.0, params.height * 0.5, 0.0}, face_half};
  spec.portals.exit_surface = {{spec.cabin_length, params.height * 0.5, 0.0}, face_half};
  spec.portals.entry_target = {path.start() + spec.up * (params.height * 0.5), rot};
  spec.portals.exit_target = {path.end() + spec.up * (params.height * 0.5), rot};
  return spec;
}

double available_cabin_length(const Vec3& world_axis, const TunnelParams& params, const PlaySpace& playspace,
                              const Pose& entry_pose) {
  const Vec3 heading = params.tracking_to_world.conjugate().rotate(world_axis);
  const Vec2 dir = floor_of(heading);
  const Vec2 entry = floor_of(entry_pose.position);
  if (!playspace.contains(entry)) return -params.exit_clearance;
  return playspace.distance_to_boundary(entry, dir) - params.exit_clearance;
}

TunnelSpec tunnel_build(const Segment& path, const GainStrategy& strategy, const TunnelParams& params,
                        const PlaySpace& playspace, const Pose& entry_pose) {
  if (std::abs(path.start().y - path.end().y) > kHeightTolerance) {
    throw Error(ErrorCode::NonHorizontalPath, "tunnel anchors must share the same height");
  }
  const double d = path.length();
  const double available = available_cabin_length(path.direction(), params, playspace, entry_pose);

  const double gain = std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FixedGain>) {
          if (!(s.gain >= 1.0)) throw Error(ErrorCode::GainBelowOne, "gain must be >= 1");
          return s.gain;
        } else if constexpr (std::is_same_v<T, FixedCabinLength>) {
          if (!(s.length > 0.0)) throw Error(ErrorCode::InvalidArgument, "cabin length must be positive");
          if (s.length > d) {
            throw Error(ErrorCode::GainBelowOne, "requested cabin is longer than the virtual path");
          }
          return d / s.length;
        } else {
          if (!(available > 0.0)) {
            throw Error(ErrorCode::CabinDoesNotFit, "no physical room in front of the user");
          }
          return d / std::min(available, d);
        }
      },
      strategy);

  TunnelSpec spec = make_tunnel(path, gain, params);
  if (spec.cabin_length > available + 1e-12) {
    throw Error(ErrorCode::CabinDoesNotFit, "cabin length " + std::to_string(spec.cabin_length) +
                                                " m exceeds the available " + std::to_string(available) + " m");
  }
  return spec;
}

StepProjection project_step(const Vec3& step, const Vec3& axis) {
  Vec3 up, side;
  cabin_basis(axis, up, side);
  return {dot(step, axis), {dot(step, up), dot(step, side)}};
}

TraversalState enter_cabin(const TunnelSpec& spec, const Vec3& world_point) {
  const Vec3 rel = world_point - spec.path.start();
  TraversalState s;
  s.parent = RigParent::Cabin;
  s.lateral = {dot(rel, spec.up), dot(rel, spec.side)};
  return s;
}

Vec3 traversal_world_position(const TunnelSpec& spec, const TraversalState& state) {
  return spec.path.start() + spec.axis * (spec.gain * state.x + state.lean) + spec.up * state.lateral.x +
         spec.side * state.lateral.y;
}

TraversalUpdate advance_traversal(const TraversalState& state, const TunnelSpec& spec, const Vec3& step,
                                  std::optional<double> driver_forward) {
  if (state.parent != RigParent::Cabin) {
    throw Error(ErrorCode::NotInCabin, "rig is not parented to the cabin");
  }
  const double forward = dot(step, spec.axis);
  const double scaled = driver_forward.value_or(forward);

  TraversalUpdate out;
  out.state = state;
  const double raw = state.x + scaled;
  out.state.x = std::clamp(raw, 0.0, spec.cabin_length);
  out.overflow = raw - out.state.x;
  out.state.cabin_offset = (spec.gain - 1.0) * out.state.x;
  out.state.lateral = state.lateral + Vec2{dot(step, spec.up), dot(step, spec.side)};
  out.state.lean = state.lean + (forward - scaled);
  out.world_position = traversal_world_position(spec, out.state);
  return out;
}

Vec3 cabin_origin(const TunnelSpec& spec, const TraversalState& state) {
  return spec.path.start() + spec.axis * state.cabin_offset;
}

Vec3 to_cabin_local(const TunnelSpec& spec, const TraversalState& state, const Vec3& world_point) {
  const Vec3 rel = world_point - cabin_origin(spec, state);
  return {dot(rel, spec.axis), dot(rel, spec.up), dot(rel, spec.side)};
}

Vec3 cabin_local_direction(const TunnelSpec& spec, const Vec3& d) {
  return {dot(d, spec.axis), dot(d, spec.up), dot(d, spec.side)};
}

Pose portal_surface_pose(const TunnelSpec& spec, const TraversalState& state, PortalSide which) {
  const PortalSurface& face = which == PortalSide::Entry ? spec.portals.entry_surface : spec.portals.exit_surface;
  const Vec3 world = cabin_origin(spec, state) + spec.axis * face.center.x + spec.up * face.center.y +
                     spec.side * face.center.z;
  return {world, spec.cabin_rotation()};
}

Transform portal_view_transform(const TunnelSpec& spec, const TraversalState& state, PortalSide which) {
  const Pose surface = portal_surface_pose(spec, state, which);
  const Pose& target = which == PortalSide::Entry ? spec.portals.entry_target : spec.portals.exit_target;
  return target.to_transform() * surface.to_transform().inverse();
}

SurfaceHit window_mask(const TunnelSpec& spec, const Vec3& head, const Vec3& view_dir) {
  const double half_w = spec.width * 0.5;
  if (head.x < -kContainTolerance || head.x > spec.cabin_length + kContainTolerance ||
      head.y < -kContainTolerance || head.y > spec.height + kContainTolerance ||
      std::abs(head.z) > half_w + kContainTolerance) {
    throw Error(ErrorCode::HeadOutsideCabin, "head is outside the cabin volume");
  }
  const Vec3 d = normalized(view_dir);

  enum class Face { Along, Side, Vertical };
  struct Candidate {
    double t;
    Face face;
  };
  std::array<Candidate, 3> candidates{};
  std::size_t n = 0;
  if (d.x != 0.0) candidates[n++] = {((d.x > 0.0 ? spec.cabin_length : 0.0) - head.x) / d.x, Face::Along};
  if (d.z != 0.0) candidates[n++] = {((d.z > 0.0 ? half_w : -half_w) - head.z) / d.z, Face::Side};
  if (d.y != 0.0) candidates[n++] = {((d.y > 0.0 ? spec.height : 0.0) - head.y) / d.y, Face::Vertical};

  // Ties resolve in candidate order: portal, then side wall, then roof/floor.
  Candidate best = candidates[0];
  for (std::size_t i = 1; i < n; ++i) {
    if (candidates[i].t < best.t) best = candidates[i];
  }
  switch (best.face) {
    case Face::Along: return d.x > 0.0 ? SurfaceHit::PortalExit : SurfaceHit::PortalEntry;
    case Face::Side: {
      const double hit_height = head.y + best.t * d.y;
      return spec.windows.is_window_height(hit_height) ? SurfaceHit::Window : SurfaceHit::Wall;
    }
    case Face::Vertical: return SurfaceHit::Wall;
  }
  return SurfaceHit::Wall;
}

const char* to_string(SurfaceHit hit) {
  switch (hit) {
    case SurfaceHit::Wall: return "Wall";
    case SurfaceHit::Window: return "Window";
    case SurfaceHit::PortalEntry: return "PortalEntry";
    case SurfaceHit::PortalExit: return "PortalExit";
    case SurfaceHit::Outside: return "Outside";
  }
  return "?";
}

}  // namespace tws
