#include "mrmc/workspace.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrmc {

std::string to_string(const CellIndex& c) {
  return std::to_string(c.col) + ":" + std::to_string(c.row);
}

CellGrid::CellGrid(const Rect& bounds, double cell_size) : bounds_(bounds), cell_size_(cell_size) {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size)) {
    throw std::invalid_argument("cell_size must be positive");
  }
  if (bounds.degenerate()) throw std::invalid_argument("workspace bounds are degenerate");
  // A relative tolerance keeps e.g. 10 / 0.5 from producing 21 columns.
  auto count = [&](double extent) {
    const double q = extent / cell_size;
    const double r = std::round(q);
    return static_cast<int>(std::abs(q - r) < 1e-9 * std::max(1.0, q) ? r : std::ceil(q));
  };
  cols_ = count(bounds.width());
  rows_ = count(bounds.height());
}

Rect CellGrid::box(const CellIndex& c) const {
  const double x0 = bounds_.xmin + c.col * cell_size_;
  const double y0 = bounds_.ymin + c.row * cell_size_;
  return {x0, y0, std::min(x0 + cell_size_, bounds_.xmax), std::min(y0 + cell_size_, bounds_.ymax)};
}

Vec2 CellGrid::center(const CellIndex& c) const {
  return {bounds_.xmin + (c.col + 0.5) * cell_size_, bounds_.ymin + (c.row + 0.5) * cell_size_};
}

CellIndex CellGrid::locate(Vec2 p) const {
  const int col = static_cast<int>(std::floor((p.x - bounds_.xmin) / cell_size_));
  const int row = static_cast<int>(std::floor((p.y - bounds_.ymin) / cell_size_));
  return {std::clamp(col, 0, cols_ - 1), std::clamp(row, 0, rows_ - 1)};
}

void CellGrid::candidate_range(const Rect& r, CellIndex& lo, CellIndex& hi) const {
  // Widen by one cell on each side; exact membership is decided by the
  // closed-set distance test of the caller.
  lo.col = std::max(0, static_cast<int>(std::floor((r.xmin - bounds_.xmin) / cell_size_)) - 1);
  lo.row = std::max(0, static_cast<int>(std::floor((r.ymin - bounds_.ymin) / cell_size_)) - 1);
  hi.col = std::min(cols_ - 1, static_cast<int>(std::floor((r.xmax - bounds_.xmin) / cell_size_)) + 1);
  hi.row = std::min(rows_ - 1, static_cast<int>(std::floor((r.ymax - bounds_.ymin) / cell_size_)) + 1);
}

CellGrid decompose(const Rect& bounds, double cell_size) { return CellGrid(bounds, cell_size); }

namespace {

template <typename Pred>
CellSet collect(const CellGrid& grid, const Rect& aabb, Pred&& touches) {
  CellSet out;
  if (!aabb.intersects(grid.bounds())) return out;
  CellIndex lo, hi;
  grid.candidate_range(aabb, lo, hi);
  for (int col = lo.col; col <= hi.col; ++col) {
    for (int row = lo.row; row <= hi.row; ++row) {
      const CellIndex c{col, row};
      if (touches(grid.box(c))) out.insert(c);
    }
  }
  return out;
}

}  // namespace

CellSet cells_intersecting(const CellGrid& grid, const Disc& region) {
  const Rect aabb = Rect{region.center.x, region.center.y, region.center.x, region.center.y}
                        .inflated(region.radius);
  return collect(grid, aabb, [&](const Rect& b) { return intersects(region, b); });
}

CellSet cells_intersecting(const CellGrid& grid, const Rect& region) {
  return collect(grid, region, [&](const Rect& b) { return b.intersects(region); });
}

CellSet cells_intersecting(const CellGrid& grid, const Capsule& region) {
  const Rect aabb = Rect{std::min(region.a.x, region.b.x), std::min(region.a.y, region.b.y),
                         std::max(region.a.x, region.b.x), std::max(region.a.y, region.b.y)}
                        .inflated(region.radius);
  return collect(grid, aabb, [&](const Rect& b) { return intersects(region, b); });
}

CellSet cells_intersecting(const CellGrid& grid, Vec2 point) {
  return cells_intersecting(grid, Disc{point, 0.0});
}

Workspace::Workspace(const Rect& bounds, std::vector<Rect> obstacles, double cell_size)
    : bounds_(bounds), obstacles_(std::move(obstacles)), grid_(bounds, cell_size) {
  for (const Rect& o : obstacles_) {
    if (o.degenerate()) throw std::invalid_argument("obstacle rectangle is degenerate");
    if (!bounds_.contains(o)) throw std::invalid_argument("obstacle lies outside the workspace bounds");
  }
}

bool Workspace::is_region_free(const Disc& region) const {
  const Vec2 c = region.center;
  const double r = region.radius;
  if (c.x - r < bounds_.xmin || c.x + r > bounds_.xmax || c.y - r < bounds_.ymin ||
      c.y + r > bounds_.ymax) {
    return false;
  }
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [&](const Rect& o) { return intersects(region, o); });
}

bool Workspace::is_region_free(const Capsule& region) const {
  if (!is_region_free(Disc{region.a, region.radius}) || !is_region_free(Disc{region.b, region.radius})) {
    return false;
  }
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [&](const Rect& o) { return intersects(region, o); });
}

bool Workspace::is_region_free(const Rect& region) const {
  if (!bounds_.contains(region)) return false;
  return std::none_of(obstacles_.begin(), obstacles_.end(),
                      [&](const Rect& o) { return o.intersects(region); });
}

bool Workspace::cell_blocked(const CellIndex& c) const {
  const Rect b = grid_.box(c);
  return std::any_of(obstacles_.begin(), obstacles_.end(),
                     [&](const Rect& o) { return o.contains(b); });
}

bool is_region_free(const Workspace& ws, const Disc& region) { return ws.is_region_free(region); }

}  // namespace mrmc
