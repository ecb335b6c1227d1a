#pragma once

// Tunnel construction and traversal kinematics.
//
// A tunnel spans the virtual path p_s -> p_e (the hull, length d). The cabin
// the user walks through is d / a_g long. While the rig is parented to the
// cabin, a forward physical displacement x along the axis puts the user at
// a_g * x in the world: the cabin itself carries (a_g - 1) * x. Off-axis
// motion (head bob, sway) maps 1:1.

#include <optional>
#include <variant>

#include "tws/geometry.hpp"

namespace tws {

struct FixedGain {
  double gain = 30.0;
};
struct FixedCabinLength {
  double length = 2.0;
};
/// Longest cabin that fits in front of the user, then a_g = d / L.
struct AdaptiveToPlayspace {};

using GainStrategy = std::variant<FixedGain, FixedCabinLength, AdaptiveToPlayspace>;

/// Horizontal window stripes on both side walls, running the full cabin
/// length. Heights are measured from the cabin floor.
struct WindowLayout {
  int stripe_count = 3;
  double stripe_height = 0.25;
  double stripe_spacing = 0.20;
  double sill_height = 1.0;

  /// Fraction of side-wall area that is glass.
  double coverage_ratio(double wall_height) const;
  bool is_window_height(double height) const;
  /// Throws InvalidArgument if the stripes do not fit the wall.
  void validate(double wall_height) const;

  /// `count` bands with fixed centers at (i + 0.5) * H / count and height
  /// coverage * H / count. Layouts with growing coverage are nested.
  static WindowLayout centered_bands(int count, double coverage, double wall_height);
};

enum class ScalingDriver { Head, CenterOfMass };

struct TunnelParams {
  double width = 1.5;
  double height = 2.3;
  WindowLayout windows;
  /// Physical room required past the cabin exit so the user can leave it.
  double exit_clearance = 0.5;
  /// The rig counts as fully outside the cabin once its head is this far
  /// past a portal plane.
  double body_radius = 0.25;
  ScalingDriver driver = ScalingDriver::Head;
  /// Tracking-space to world rotation (the rig's orientation).
  Quat tracking_to_world;
};

struct PortalSurface {
  /// Face center, cabin-local frame (along, up, side).
  Vec3 center;
  Vec2 half_extents;  // (side, up)
};

struct PortalPair {
  PortalSurface entry_surface;
  PortalSurface exit_surface;
  Pose entry_target;  // hull near end, world
  Pose exit_target;   // hull far end, world
};

enum class PortalSide { Entry, Exit };

struct TunnelSpec {
  Segment path;
  double gain = 1.0;
  double hull_length = 0.0;
  double cabin_length = 0.0;
  double width = 0.0;
  double height = 0.0;
  /// Cabin-local basis in world coordinates: axis x up = side.
  Vec3 axis{};
  Vec3 up{};
  Vec3 side{};
  WindowLayout windows{};
  PortalPair portals{};
  double coverage_ratio = 0.0;
  double body_radius = 0.25;

  /// World rotation taking cabin-local (along, up, side) to world.
  Quat cabin_rotation() const;
};

enum class RigParent { World, Cabin };

struct TraversalState {
  /// Physical displacement along the axis since entering the cabin, [0, L].
  double x = 0.0;
  /// Cabin displacement along the hull, (a_g - 1) * x.
  double cabin_offset = 0.0;
  RigParent parent = RigParent::World;
  /// Off-axis offset from p_s in the cabin frame (up, side), mapped 1:1.
  Vec2 lateral;
  /// Along-axis head motion that is not scaled (center-of-mass driver only).
  double lean = 0.0;
};

struct StepProjection {
  double forward = 0.0;
  Vec2 lateral;  // (up, side)
};

struct TraversalUpdate {
  TraversalState state;
  Vec3 world_position;
  /// Forward motion clamped away at either end (positive past the exit).
  double overflow = 0.0;
};

/// Builds the spec without the playspace fit check.
TunnelSpec make_tunnel(const Segment& path, double gain, const TunnelParams& params = {});

/// `entry_pose` is the tracking-space pose at which the user will enter the
/// cabin (floor point of the entrance). Throws DegeneratePath,
/// NonHorizontalPath, GainBelowOne or CabinDoesNotFit.
TunnelSpec tunnel_build(const Segment& path, const GainStrategy& strategy, const TunnelParams& params,
                        const PlaySpace& playspace, const Pose& entry_pose);

/// Longest cabin that fits from `entry_pose` along the tunnel axis.
double available_cabin_length(const Vec3& world_axis, const TunnelParams& params, const PlaySpace& playspace,
                              const Pose& entry_pose);

/// Cabin-local basis (up, side) for an arbitrary unit axis.
void cabin_basis(const Vec3& axis, Vec3& up, Vec3& side);

StepProjection project_step(const Vec3& step, const Vec3& axis);

/// State right after the rig crosses the entry plane at `world_point`.
TraversalState enter_cabin(const TunnelSpec& spec, const Vec3& world_point);

/// World position of the parented rig for a state.
Vec3 traversal_world_position(const TunnelSpec& spec, const TraversalState& state);

/// Throws NotInCabin unless the rig is parented. `driver_forward` overrides
/// the scaled forward amount (center-of-mass driver); the step's remaining
/// along-axis motion is then carried unscaled in `lean`.
TraversalUpdate advance_traversal(const TraversalState& state, const TunnelSpec& spec, const Vec3& step,
                                  std::optional<double> driver_forward = std::nullopt);

/// World origin of the cabin frame (entrance, floor, centerline).
Vec3 cabin_origin(const TunnelSpec& spec, const TraversalState& state);
Vec3 to_cabin_local(const TunnelSpec& spec, const TraversalState& state, const Vec3& world_point);
Vec3 cabin_local_direction(const TunnelSpec& spec, const Vec3& world_dir);

/// World pose of a portal face for the current state.
Pose portal_surface_pose(const TunnelSpec& spec, const TraversalState& state, PortalSide which);

/// Rigid transform taking a viewpoint in front of the portal to the
/// equivalent viewpoint at the portal's target.
Transform portal_view_transform(const TunnelSpec& spec, const TraversalState& state, PortalSide which);

enum class SurfaceHit { Wall, Window, PortalEntry, PortalExit, Outside };

/// First surface hit by a view ray from a head inside the cabin. Inputs are
/// cabin-local (along, up, side). Throws HeadOutsideCabin.
SurfaceHit window_mask(const TunnelSpec& spec, const Vec3& head_local, const Vec3& view_dir_local);

const char* to_string(SurfaceHit hit);

}  // namespace tws
