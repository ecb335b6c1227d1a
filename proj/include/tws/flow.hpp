#pragma once

// Optical-flow proxy: angular speed of synthetic far-field points seen along a
// fixed bundle of view directions. Only orderings and limits are meaningful.

#include <optional>
#include <vector>

#include "tws/geometry.hpp"
#include "tws/tunnel.hpp"

namespace tws {

struct FlowConfig {
  double fov_deg = 110.0;
  int directions = 256;
  std::vector<double> distances{10.0, 50.0};
};

/// Unit directions in a cone around the forward axis -z, head frame.
struct DirectionBundle {
  std::vector<Vec3> dirs;
};

/// Fibonacci spiral on the spherical cap: deterministic and near-uniform.
DirectionBundle make_bundle(const FlowConfig& cfg);

struct FlowSample {
  double mean_angular_speed = 0.0;     // rad/s
  double visible_fraction_fast = 0.0;  // [0, 1]
};

struct FlowInput {
  /// Head pose at the start of the interval; orientation aims the bundle.
  Pose head_before;
  Vec3 head_after;
  /// Head displacement the user actually walked, world axes, unscaled.
  Vec3 physical_step;
  double dt = 0.0;
  /// Cabin context when the head is parented; rest-frame surfaces move with it.
  const TunnelSpec* spec = nullptr;
  std::optional<TraversalState> cabin_before;
  std::optional<TraversalState> cabin_after;
};

/// Translational flow; requires dt > 0. Cabin walls, roof, floor and portals
/// are rest frame; windows and the open world show world-fixed content.
FlowSample flow_proxy(const FlowInput& in, const DirectionBundle& bundle, const std::vector<double>& distances);

}  // namespace tws
