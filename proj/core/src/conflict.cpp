#include "mrmc/conflict.hpp"

#include <algorithm>
#include <stdexcept>

namespace mrmc {

namespace {
constexpr double kTimeSlack = 1e-9;
}

OccupancyMap occupancy_map(const PositionTrajectory& trajectory, double t_c, double t_fl,
                           double footprint_radius, const CellGrid& grid) {
  if (trajectory.empty()) throw std::invalid_argument("empty trajectory");
  if (t_fl < t_c) throw std::invalid_argument("t_fl precedes t_c");
  if (t_c < trajectory.t0 - kTimeSlack || t_fl > trajectory.end_time() + kTimeSlack) {
    throw std::invalid_argument("trajectory does not cover [t_c, t_fl]");
  }
  OccupancyMap out;
  auto mark = [&](const CellSet& cells, Interval span) {
    for (const CellIndex& c : cells) out[c].insert(span);
  };

  if (trajectory.size() == 1 || t_fl - t_c <= kTimeSlack) {
    mark(cells_intersecting(grid, Disc{trajectory.at(t_c), footprint_radius}), {t_c, t_fl});
    return out;
  }

  for (std::size_t k = 0; k + 1 < trajectory.size(); ++k) {
    if (trajectory.time(k) > t_fl - kTimeSlack) break;
    if (trajectory.time(k + 1) < t_c + kTimeSlack) continue;
    const double a = std::max(trajectory.time(k), t_c);
    const double b = std::min(trajectory.time(k + 1), t_fl);
    const Vec2 pa = a > trajectory.time(k) + kTimeSlack ? trajectory.at(a) : trajectory.points[k];
    const Vec2 pb = b < trajectory.time(k + 1) - kTimeSlack ? trajectory.at(b) : trajectory.points[k + 1];
    const CellSet cells = pa == pb ? cells_intersecting(grid, Disc{pa, footprint_radius})
                                   : cells_intersecting(grid, Capsule{pa, pb, footprint_radius});
    mark(cells, {a, b});
  }
  return out;
}

CellSet key_set(const OccupancyMap& map) {
  CellSet out;
  for (const auto& [cell, _] : map) out.insert(out.end(), cell);
  return out;
}

HorizonView horizon_view(const Trajectory& plan, double t_c, double sensing_radius,
                         double footprint_radius, const CellGrid& grid) {
  HorizonView view;
  view.t_c = t_c;
  if (plan.empty()) throw std::invalid_argument("empty plan");
  if (t_c >= plan.end_time() - kTimeSlack) {
    view.t_fl = t_c;
    view.holds_forever = true;
    for (const CellIndex& c : cells_intersecting(grid, Disc{plan.back().position(), footprint_radius})) {
      view.occupancy[c].insert({t_c, kForever});
    }
    return view;
  }
  const PositionTrajectory positions = project_position(plan);
  const Vec2 center = positions.at(t_c);
  view.t_fl = first_leave_time(positions, center, sensing_radius, t_c);
  view.occupancy = occupancy_map(positions, t_c, view.t_fl, footprint_radius, grid);
  const Vec2 last = positions.points.back();
  view.holds_forever = view.t_fl >= positions.end_time() - kTimeSlack &&
                       distance(last, center) <= sensing_radius;
  if (view.holds_forever) {
    for (const CellIndex& c : cells_intersecting(grid, Disc{last, footprint_radius})) {
      view.occupancy[c].insert({positions.end_time(), kForever});
    }
  }
  return view;
}

CellSet intersect(const CellSet& a, const CellSet& b) {
  CellSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

CellSet conflict_region(const OccupancyMap& map_i, const OccupancyMap& map_j) {
  CellSet out;
  auto a = map_i.begin();
  auto b = map_j.begin();
  while (a != map_i.end() && b != map_j.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      out.insert(out.end(), a->first);
      ++a;
      ++b;
    }
  }
  return out;
}

ConflictReport detect_conflicts(const OccupancyMap& mine,
                                const std::map<int, OccupancyMap>& neighbor_maps) {
  ConflictReport report;
  for (const auto& [id, theirs] : neighbor_maps) {
    for (const CellIndex& cell : conflict_region(mine, theirs)) {
      IntervalSet overlap = mine.at(cell).intersection(theirs.at(cell));
      if (overlap.empty()) continue;
      report.conflict_neighbors.insert(id);
      report.cells[id].push_back({cell, std::move(overlap)});
    }
  }
  return report;
}

bool spatial_conflict(const CellSet& cells_i, const CellSet& updated_cells_j) {
  auto a = cells_i.begin();
  auto b = updated_cells_j.begin();
  while (a != cells_i.end() && b != updated_cells_j.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      return true;
    }
  }
  return false;
}

}  // namespace mrmc
