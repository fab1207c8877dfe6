#pragma once

#include <cmath>
#include <compare>
#include <optional>

namespace mrmc {

// Inflation applied to footprints wherever a discrete check must stay
// conservative with respect to positions produced by numerical integration.
inline constexpr double kGeomEps = 1e-6;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] double squared_norm() const { return x * x + y * y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Closed axis-aligned rectangle.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  [[nodiscard]] double width() const { return xmax - xmin; }
  [[nodiscard]] double height() const { return ymax - ymin; }
  [[nodiscard]] Vec2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  [[nodiscard]] bool degenerate() const { return !(xmax > xmin) || !(ymax > ymin); }
  [[nodiscard]] bool contains(Vec2 p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  [[nodiscard]] bool contains(const Rect& r) const {
    return r.xmin >= xmin && r.xmax <= xmax && r.ymin >= ymin && r.ymax <= ymax;
  }
  [[nodiscard]] bool intersects(const Rect& r) const {
    return r.xmin <= xmax && r.xmax >= xmin && r.ymin <= ymax && r.ymax >= ymin;
  }
  [[nodiscard]] Rect inflated(double margin) const {
    return {xmin - margin, ymin - margin, xmax + margin, ymax + margin};
  }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// Closed disc; the robot footprint model.
struct Disc {
  Vec2 center;
  double radius = 0.0;
};

/// Set swept by a disc moving along the segment [a, b].
struct Capsule {
  Vec2 a;
  Vec2 b;
  double radius = 0.0;
};

double distance(Vec2 p, const Rect& r);
double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
double distance(Vec2 a, Vec2 b, const Rect& r);  // segment to rectangle

bool segment_intersects(Vec2 a, Vec2 b, const Rect& r);

bool intersects(const Disc& d, const Rect& r);
bool intersects(const Capsule& c, const Rect& r);

/// Parameter range {s in [0, length] : dist(origin + s*dir, box) <= radius}
/// for a unit direction. Empty when the line misses the inflated box.
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};
std::optional<ParamRange> line_range_near_rect(Vec2 origin, Vec2 dir, double length,
                                               const Rect& box, double radius);

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

}  // namespace mrmc
