#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace navth {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Axis-aligned rectangle [min, max].
struct Rect {
  Vec2 min;
  Vec2 max;

  double width() const { return max.x - min.x; }
  double depth() const { return max.y - min.y; }
  Vec2 center() const { return {0.5 * (min.x + max.x), 0.5 * (min.y + max.y)}; }

  Rect inflated(double r) const { return {{min.x - r, min.y - r}, {max.x + r, max.y + r}}; }

  /// Closed containment.
  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  /// Open containment (strict interior).
  bool contains_strict(Vec2 p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y;
  }
  /// Positive-area overlap.
  bool overlaps(const Rect& o) const {
    return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y;
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Degrees to radians.
inline double radians(double deg) { return deg * kPi / 180.0; }
inline double degrees(double rad) { return rad * 180.0 / kPi; }

/// Reduces an angle in degrees to [0, 360).
inline double wrap_degrees(double deg) {
  double h = std::fmod(deg, 360.0);
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  return h;
}

/// Signed difference a - b reduced to (-180, 180].
inline double angle_difference(double a, double b) {
  double d = wrap_degrees(a - b);
  return d > 180.0 ? d - 360.0 : d;
}

/// Unit vector for a heading in degrees (counterclockwise from +x).
/// Multiples of 45 degrees map to exact table values so that grid-aligned
/// motion stays on the lattice.
inline Vec2 heading_vector(double heading_deg) {
  const double h = wrap_degrees(heading_deg);
  const double q = h / 45.0;
  if (q == std::floor(q)) {
    constexpr double s = 0.70710678118654752440;
    switch (static_cast<int>(q)) {
      case 0: return {1.0, 0.0};
      case 1: return {s, s};
      case 2: return {0.0, 1.0};
      case 3: return {-s, s};
      case 4: return {-1.0, 0.0};
      case 5: return {-s, -s};
      case 6: return {0.0, -1.0};
      case 7: return {s, -s};
      default: break;
    }
  }
  const double r = radians(h);
  return {std::cos(r), std::sin(r)};
}

/// Bearing of `to` as seen from `from`, degrees in [0, 360).
inline double bearing_to(Vec2 from, Vec2 to) {
  return wrap_degrees(degrees(std::atan2(to.y - from.y, to.x - from.x)));
}

/// Ray/box slab test. Returns the entry parameter t >= 0 of the ray
/// origin + t * dir into the open box, or nullopt. An origin inside the box
/// yields 0.
inline std::optional<double> ray_rect_entry(Vec2 origin, Vec2 dir, const Rect& box) {
  double t0 = 0.0;
  double t1 = kInf;
  const double o[2] = {origin.x, origin.y};
  const double d[2] = {dir.x, dir.y};
  const double lo[2] = {box.min.x, box.min.y};
  const double hi[2] = {box.max.x, box.max.y};
  for (int a = 0; a < 2; ++a) {
    if (d[a] == 0.0) {
      if (o[a] <= lo[a] || o[a] >= hi[a]) return std::nullopt;
      continue;
    }
    double ta = (lo[a] - o[a]) / d[a];
    double tb = (hi[a] - o[a]) / d[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return std::nullopt;
  }
  return t0;
}

/// Exit parameter of a ray starting inside a closed box.
inline double ray_rect_exit(Vec2 origin, Vec2 dir, const Rect& box) {
  double t = kInf;
  if (dir.x > 0) t = std::min(t, (box.max.x - origin.x) / dir.x);
  if (dir.x < 0) t = std::min(t, (box.min.x - origin.x) / dir.x);
  if (dir.y > 0) t = std::min(t, (box.max.y - origin.y) / dir.y);
  if (dir.y < 0) t = std::min(t, (box.min.y - origin.y) / dir.y);
  return std::max(t, 0.0);
}

/// First intersection parameter of a unit-direction ray with a circle.
inline std::optional<double> ray_circle_entry(Vec2 origin, Vec2 dir, Vec2 center, double radius) {
  const Vec2 oc = origin - center;
  const double b = dot(oc, dir);
  const double c = dot(oc, oc) - radius * radius;
  if (c <= 0.0) return 0.0;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double t = -b - std::sqrt(disc);
  if (t < 0.0) return std::nullopt;
  return t;
}

/// True when the open segment (a, b) passes through the interior of the box.
inline bool segment_crosses_rect(Vec2 a, Vec2 b, const Rect& box) {
  const Vec2 d = b - a;
  const double len = norm(d);
  if (len == 0.0) return box.contains_strict(a);
  const Vec2 u = (1.0 / len) * d;
  auto t = ray_rect_entry(a, u, box);
  return t && *t < len;
}

}  // namespace navth
