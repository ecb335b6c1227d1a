#include "tws/geometry.hpp"

#include <algorithm>
#include <limits>

#include "tws/error.hpp"

namespace tws {

Vec3 normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
  return v / n;
}

Quat Quat::from_axis_angle(const Vec3& axis, double radians) {
  const Vec3 a = tws::normalized(axis);
  const double s = std::sin(radians * 0.5);
  return Quat{std::cos(radians * 0.5), a.x * s, a.y * s, a.z * s}.normalized();
}

Quat Quat::look_along(const Vec3& dir) {
  if (std::abs(dir.x) + std::abs(dir.z) == 0.0) return identity();
  return yaw(std::atan2(-dir.x, -dir.z));
}

Quat Quat::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero quaternion");
  return {w / n, x / n, y / n, z / n};
}

Vec3 Quat::rotate(const Vec3& v) const {
  // v' = v + 2w (q x v) + 2 q x (q x v)
  const Vec3 q{x, y, z};
  const Vec3 t = cross(q, v) * 2.0;
  return v + t * w + cross(q, t);
}

Quat Quat::operator*(const Quat& o) const {
  return {w * o.w - x * o.x - y * o.y - z * o.z,
          w * o.x + x * o.w + y * o.z - z * o.y,
          w * o.y - x * o.z + y * o.w + z * o.x,
          w * o.z + x * o.y - y * o.x + z * o.w};
}

Transform Transform::inverse() const {
  const Quat inv = rotation.conjugate();
  return {inv, -inv.rotate(translation)};
}

Transform Transform::operator*(const Transform& rhs) const {
  return {(rotation * rhs.rotation).normalized(), rotation.rotate(rhs.translation) + translation};
}

Pose compose(const Pose& parent, const Pose& child) {
  return Pose::from_transform(parent.to_transform() * child.to_transform());
}

Pose decompose(const Pose& composite, const Pose& parent) {
  return Pose::from_transform(parent.to_transform().inverse() * composite.to_transform());
}

PlaySpace::PlaySpace(Vec2 half_extents, Vec2 origin) : half_extents_(half_extents), origin_(origin) {
  if (!(half_extents.x > 0.0) || !(half_extents.y > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "playspace half extents must be strictly positive");
  }
}

double PlaySpace::margin(Vec2 point) const {
  const double dx = std::abs(point.x - origin_.x) - half_extents_.x;
  const double dy = std::abs(point.y - origin_.y) - half_extents_.y;
  if (dx <= 0.0 && dy <= 0.0) return -std::max(dx, dy);
  return -std::hypot(std::max(dx, 0.0), std::max(dy, 0.0));
}

double PlaySpace::distance_to_boundary(Vec2 point, Vec2 direction) const {
  if (!contains(point)) return 0.0;
  const double n = norm(direction);
  if (!(n > 0.0)) throw Error(ErrorCode::InvalidArgument, "zero direction");
  const Vec2 d{direction.x / n, direction.y / n};
  double t = std::numeric_limits<double>::infinity();
  const auto clip = [&t](double p, double o, double h, double dir) {
    if (dir > 0.0) t = std::min(t, (o + h - p) / dir);
    if (dir < 0.0) t = std::min(t, (o - h - p) / dir);
  };
  clip(point.x, origin_.x, half_extents_.x, d.x);
  clip(point.y, origin_.y, half_extents_.y, d.y);
  return std::max(t, 0.0);
}

Segment::Segment(Vec3 start, Vec3 end) : start_(start), end_(end) {
  if (!(norm(end - start) > 0.0)) {
    throw Error(ErrorCode::DegeneratePath, "segment start and end coincide");
  }
}

bool NavRegion::contains(Vec2 p) const {
  return std::any_of(rects.begin(), rects.end(), [&](const Rect2& r) { return r.contains(p); });
}

bool NavRegion::contains_segment(Vec2 a, Vec2 b, int samples) const {
  for (int i = 0; i <= samples; ++i) {
    const double s = static_cast<double>(i) / samples;
    if (!contains(a + (b - a) * s)) return false;
  }
  return true;
}

}  // namespace tws
