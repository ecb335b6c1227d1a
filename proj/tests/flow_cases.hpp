#pragma once

// Flow proxy evaluated for one forward step at gain 30 in a 75 m tunnel:
// naked gain in the open world, the physical baseline, and in-cabin views
// for several window layouts.

#include <vector>

#include "tws/flow.hpp"
#include "tws/tunnel.hpp"

namespace flowcase {

struct Pose {
  tws::Vec3 head_local;  // cabin-local (along, up, side)
  tws::Vec3 gaze_local;  // cabin-local direction
};

/// Head 0.35 m from the side wall, looking straight at it.
inline Pose window_facing() { return {{1.25, 1.7, 0.40}, {0, 0, 1}}; }
/// Head on the centerline looking down the cabin.
inline Pose forward_gaze() { return {{0.5, 1.7, 0.0}, {1, 0, 0}}; }

inline constexpr double kGain = 30.0;
inline constexpr double kStep = 1.0 / 90.0;
inline constexpr double kDt = 1.0 / 90.0;
inline const std::vector<double> kCoverage{0.0, 0.25, 0.5, 0.75, 1.0};

inline tws::TunnelSpec tunnel(const tws::WindowLayout& windows) {
  tws::TunnelParams p;
  p.windows = windows;
  return tws::make_tunnel(tws::Segment({0, 0, 0}, {75, 0, 0}), kGain, p);
}

inline tws::Quat gaze(const tws::TunnelSpec& spec, const tws::Vec3& local) {
  const tws::Vec3 world = spec.axis * local.x + spec.up * local.y + spec.side * local.z;
  if (std::abs(world.y) > 1e-12) return tws::Quat::identity();
  return tws::Quat::look_along(world);
}

inline double in_cabin(const tws::WindowLayout& windows, const Pose& pose, const tws::FlowConfig& cfg = {}) {
  const tws::TunnelSpec spec = tunnel(windows);
  tws::TraversalState s0 = tws::enter_cabin(spec, spec.path.start());
  s0.x = pose.head_local.x;
  s0.cabin_offset = (spec.gain - 1.0) * s0.x;
  s0.lateral = {pose.head_local.y, pose.head_local.z};
  const tws::Vec3 step = spec.axis * kStep;
  const auto s1 = tws::advance_traversal(s0, spec, step);
  tws::FlowInput in;
  in.head_before = {tws::traversal_world_position(spec, s0), gaze(spec, pose.gaze_local)};
  in.head_after = s1.world_position;
  in.physical_step = step;
  in.dt = kDt;
  in.spec = &spec;
  in.cabin_before = s0;
  in.cabin_after = s1.state;
  return tws::flow_proxy(in, tws::make_bundle(cfg), cfg.distances).mean_angular_speed;
}

inline double open_world(double gain, const Pose& pose, const tws::FlowConfig& cfg = {}) {
  const tws::TunnelSpec spec = tunnel({});
  const tws::Vec3 head{10.0, 1.7, pose.head_local.z};
  tws::FlowInput in;
  in.head_before = {head, gaze(spec, pose.gaze_local)};
  in.head_after = head + spec.axis * (kStep * gain);
  in.physical_step = spec.axis * kStep;
  in.dt = kDt;
  return tws::flow_proxy(in, tws::make_bundle(cfg), cfg.distances).mean_angular_speed;
}

struct Sweep {
  double naked = 0.0;
  double physical = 0.0;
  double default_stripes = 0.0;
  std::vector<double> coverage;  // one per kCoverage entry
};

inline Sweep sweep(const Pose& pose) {
  Sweep s;
  s.naked = open_world(kGain, pose);
  s.physical = open_world(1.0, pose);
  s.default_stripes = in_cabin(tws::WindowLayout{}, pose);
  for (double c : kCoverage) s.coverage.push_back(in_cabin(tws::WindowLayout::centered_bands(3, c, 2.3), pose));
  return s;
}

}  // namespace flowcase
