#include "tws/flow.hpp"

#include <cmath>
#include <numbers>

#include "tws/error.hpp"

namespace tws {

namespace {

double angle_between(const Vec3& a, const Vec3& b) { return std::atan2(norm(cross(a, b)), dot(a, b)); }

bool head_inside(const TunnelSpec& spec, const Vec3& local) {
  constexpr double tol = 1e-9;
  return local.x >= -tol && local.x <= spec.cabin_length + tol && local.y >= -tol && local.y <= spec.height + tol &&
         std::abs(local.z) <= spec.width * 0.5 + tol;
}

}  // namespace

DirectionBundle make_bundle(const FlowConfig& cfg) {
  if (cfg.directions <= 0 || !(cfg.fov_deg > 0.0) || !(cfg.fov_deg <= 360.0)) {
    throw Error(ErrorCode::InvalidArgument, "flow bundle needs a positive direction count and fov in (0, 360]");
  }
  const double cos_max = std::cos(cfg.fov_deg * 0.5 * std::numbers::pi / 180.0);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  DirectionBundle b;
  b.dirs.reserve(static_cast<std::size_t>(cfg.directions));
  for (int i = 0; i < cfg.directions; ++i) {
    const double c = 1.0 - (1.0 - cos_max) * (i + 0.5) / cfg.directions;
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double phi = golden * i;
    b.dirs.push_back({s * std::cos(phi), s * std::sin(phi), -c});
  }
  return b;
}

FlowSample flow_proxy(const FlowInput& in, const DirectionBundle& bundle, const std::vector<double>& distances) {
  if (!(in.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "flow proxy needs dt > 0");
  const Vec3 h0 = in.head_before.position;
  const Vec3 h1 = in.head_after;
  const Vec3 h1_phys = h0 + in.physical_step;

  bool cabin = in.spec != nullptr && in.cabin_before.has_value();
  Vec3 cabin_shift{};
  Vec3 head_local{};
  if (cabin) {
    const TraversalState& s0 = *in.cabin_before;
    const TraversalState& s1 = in.cabin_after.value_or(s0);
    cabin_shift = in.spec->axis * (s1.cabin_offset - s0.cabin_offset);
    head_local = to_cabin_local(*in.spec, s0, h0);
    cabin = head_inside(*in.spec, head_local);
  }

  double sum = 0.0;
  std::size_t fast = 0;
  std::size_t count = 0;
  for (const Vec3& local_dir : bundle.dirs) {
    const Vec3 dir = in.head_before.orientation.rotate(local_dir);
    bool rest_frame = false;
    if (cabin) {
      const SurfaceHit hit = window_mask(*in.spec, head_local, cabin_local_direction(*in.spec, dir));
      rest_frame = hit == SurfaceHit::Wall || hit == SurfaceHit::PortalEntry || hit == SurfaceHit::PortalExit;
    }
    for (double dist : distances) {
      const Vec3 p = h0 + dir * dist;
      const Vec3 p1 = rest_frame ? p + cabin_shift : p;
      const double omega = angle_between(p - h0, p1 - h1) / in.dt;
      const double omega_phys = angle_between(p - h0, p - h1_phys) / in.dt;
      sum += omega;
      if (omega > omega_phys * (1.0 + 1e-9) + 1e-12) ++fast;
      ++count;
    }
  }
  if (count == 0) return {};
  return {sum / static_cast<double>(count), static_cast<double>(fast) / static_cast<double>(count)};
}

}  // namespace tws
