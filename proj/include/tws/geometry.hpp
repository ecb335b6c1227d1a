#pragma once

// Rigid-body substrate. World frame is right-handed, y-up, meters. The floor
// plane is (x, z); 2-vectors on the floor store (x, z) as (x, y).

#include <cmath>
#include <vector>

namespace tws {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
Vec3 normalized(const Vec3& v);

inline constexpr Vec3 kUp{0.0, 1.0, 0.0};

struct Vec2 {
  double x = 0.0, y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
};

inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// Floor projection (x, z) of a world point.
constexpr Vec2 floor_of(const Vec3& v) { return {v.x, v.z}; }
constexpr Vec3 from_floor(const Vec2& v, double height = 0.0) { return {v.x, height, v.y}; }

/// Unit quaternion (w, x, y, z).
struct Quat {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Quat identity() { return {}; }
  static Quat from_axis_angle(const Vec3& axis, double radians);
  /// Rotation about +y (counter-clockwise seen from above).
  static Quat yaw(double radians) { return from_axis_angle(kUp, radians); }
  /// Yaw that turns the -z forward direction onto `dir` (horizontal part).
  static Quat look_along(const Vec3& dir);

  Quat conjugate() const { return {w, -x, -y, -z}; }
  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quat normalized() const;
  Vec3 rotate(const Vec3& v) const;
  Quat operator*(const Quat& o) const;
  bool operator==(const Quat&) const = default;
};

/// Rigid transform: p -> rotation * p + translation.
struct Transform {
  Quat rotation;
  Vec3 translation;

  static Transform identity() { return {}; }
  static Transform translate(const Vec3& t) { return {Quat::identity(), t}; }

  Vec3 apply_point(const Vec3& p) const { return rotation.rotate(p) + translation; }
  Vec3 apply_vector(const Vec3& v) const { return rotation.rotate(v); }
  Transform inverse() const;
  /// (*this) after `rhs`: applies rhs first.
  Transform operator*(const Transform& rhs) const;
};

/// Rigid placement of an object in its parent frame.
struct Pose {
  Vec3 position;
  Quat orientation;

  static Pose identity() { return {}; }
  Transform to_transform() const { return {orientation, position}; }
  static Pose from_transform(const Transform& t) { return {t.translation, t.rotation}; }
};

/// Child pose expressed in the parent's parent frame. Orientation is
/// renormalized.
Pose compose(const Pose& parent, const Pose& child);
/// Inverse of compose: the child such that compose(parent, child) == composite.
Pose decompose(const Pose& composite, const Pose& parent);

/// Axis-aligned tracked area on the floor plane.
class PlaySpace {
 public:
  PlaySpace(Vec2 half_extents, Vec2 origin = {});

  Vec2 half_extents() const { return half_extents_; }
  Vec2 origin() const { return origin_; }

  /// Signed distance to the nearest boundary: positive inside, negative
  /// outside (Euclidean distance to the rectangle).
  double margin(Vec2 point) const;
  bool contains(Vec2 point) const { return margin(point) >= 0.0; }
  /// Distance from an interior point along a floor direction until the
  /// boundary is reached. Zero if the point is outside.
  double distance_to_boundary(Vec2 point, Vec2 direction) const;

 private:
  Vec2 half_extents_;
  Vec2 origin_;
};

/// Straight path p_s -> p_e. Degenerate segments are rejected at construction.
class Segment {
 public:
  Segment(Vec3 start, Vec3 end);

  const Vec3& start() const { return start_; }
  const Vec3& end() const { return end_; }
  double length() const { return norm(end_ - start_); }
  Vec3 direction() const { return (end_ - start_) / length(); }

 private:
  Vec3 start_;
  Vec3 end_;
};

inline double segment_length(const Segment& s) { return s.length(); }

struct Rect2 {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
};

/// Union of floor rectangles; everything else is building footprint.
struct NavRegion {
  std::vector<Rect2> rects;

  bool contains(Vec2 p) const;
  /// Every sampled point of the segment's floor projection is navigable
  /// (rectangles are convex, so the segment must be covered piecewise).
  bool contains_segment(Vec2 a, Vec2 b, int samples = 256) const;
};

}  // namespace tws
