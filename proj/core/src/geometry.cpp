#include "mrmc/geometry.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numbers>

namespace mrmc {

double distance(Vec2 p, const Rect& r) {
  const double dx = std::max({r.xmin - p.x, 0.0, p.x - r.xmax});
  const double dy = std::max({r.ymin - p.y, 0.0, p.y - r.ymax});
  return std::hypot(dx, dy);
}

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squared_norm();
  if (len2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + s * ab);
}

namespace {

// Liang-Barsky clip of o + s*d, s in [lo, hi], against r. Returns the clipped
// parameter range or nullopt.
std::optional<ParamRange> clip_line(Vec2 o, Vec2 d, double lo, double hi, const Rect& r) {
  const std::array<double, 4> p{-d.x, d.x, -d.y, d.y};
  const std::array<double, 4> q{o.x - r.xmin, r.xmax - o.x, o.y - r.ymin, r.ymax - o.y};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      lo = std::max(lo, t);
    } else {
      hi = std::min(hi, t);
    }
    if (lo > hi) return std::nullopt;
  }
  return ParamRange{lo, hi};
}

std::optional<ParamRange> clip_disc(Vec2 o, Vec2 d, Vec2 c, double radius) {
  // |o + s d - c|^2 <= r^2 with |d| = 1.
  const Vec2 oc = o - c;
  const double b = dot(oc, d);
  const double cc = oc.squared_norm() - radius * radius;
  const double disc = b * b - cc;
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  return ParamRange{-b - root, -b + root};
}

}  // namespace

bool segment_intersects(Vec2 a, Vec2 b, const Rect& r) {
  return clip_line(a, b - a, 0.0, 1.0, r).has_value();
}

double distance(Vec2 a, Vec2 b, const Rect& r) {
  if (segment_intersects(a, b, r)) return 0.0;
  double best = std::min(distance(a, r), distance(b, r));
  const std::array<Vec2, 4> corners{Vec2{r.xmin, r.ymin}, Vec2{r.xmax, r.ymin},
                                    Vec2{r.xmin, r.ymax}, Vec2{r.xmax, r.ymax}};
  for (const Vec2& c : corners) best = std::min(best, distance_to_segment(c, a, b));
  return best;
}

bool intersects(const Disc& d, const Rect& r) { return distance(d.center, r) <= d.radius; }

bool intersects(const Capsule& c, const Rect& r) { return distance(c.a, c.b, r) <= c.radius; }

std::optional<ParamRange> line_range_near_rect(Vec2 origin, Vec2 dir, double length,
                                               const Rect& box, double radius) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // The Minkowski sum of a box and a disc is the union of two cross-shaped
  // boxes and four corner discs; it is convex, so the union of the pieces'
  // parameter ranges is a single range.
  std::optional<ParamRange> acc;
  auto merge = [&](const std::optional<ParamRange>& piece) {
    if (!piece) return;
    if (!acc) {
      acc = piece;
    } else {
      acc->lo = std::min(acc->lo, piece->lo);
      acc->hi = std::max(acc->hi, piece->hi);
    }
  };
  merge(clip_line(origin, dir, -kInf, kInf,
                  {box.xmin - radius, box.ymin, box.xmax + radius, box.ymax}));
  merge(clip_line(origin, dir, -kInf, kInf,
                  {box.xmin, box.ymin - radius, box.xmax, box.ymax + radius}));
  if (radius > 0.0) {
    for (Vec2 c : {Vec2{box.xmin, box.ymin}, Vec2{box.xmax, box.ymin},
                   Vec2{box.xmin, box.ymax}, Vec2{box.xmax, box.ymax}}) {
      merge(clip_disc(origin, dir, c, radius));
    }
  }
  if (!acc) return std::nullopt;
  const double lo = std::max(acc->lo, 0.0);
  const double hi = std::min(acc->hi, length);
  if (lo > hi) return std::nullopt;
  return ParamRange{lo, hi};
}

double normalize_angle(double theta) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(theta, kTwoPi);
  if (wrapped <= -std::numbers::pi) wrapped += kTwoPi;
  if (wrapped > std::numbers::pi) wrapped -= kTwoPi;
  return wrapped;
}

}  // namespace mrmc
