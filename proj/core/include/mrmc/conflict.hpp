#pragma once

#include <map>
#include <set>
#include <vector>

#include "mrmc/dynamics.hpp"
#include "mrmc/intervals.hpp"
#include "mrmc/workspace.hpp"

namespace mrmc {

/// Cell -> times at which a footprint touches the cell.
using OccupancyMap = std::map<CellIndex, IntervalSet>;

/// Occupancy of the cells swept by a disc footprint over [t_c, t_fl].
///
/// Each sample step [t_k, t_k+1] contributes the cells met by the capsule
/// swept between the two positions, occupied for the whole step. This covers
/// every crossing shorter than one sample and makes each reported interval at
/// most one step wider on either side than the continuous one. The key set is
/// the traversed cell set.
/// Throws std::invalid_argument if the trajectory does not cover [t_c, t_fl].
OccupancyMap occupancy_map(const PositionTrajectory& trajectory, double t_c, double t_fl,
                           double footprint_radius, const CellGrid& grid);

CellSet key_set(const OccupancyMap& map);

/// What a robot can say about its own near future at time t_c: the occupancy
/// up to the moment it leaves the ball of radius R around its current
/// position. When the plan ends at rest inside that ball the final cells are
/// held forever (the robot stays where it stopped).
struct HorizonView {
  double t_c = 0.0;
  double t_fl = 0.0;
  bool holds_forever = false;
  OccupancyMap occupancy;

  [[nodiscard]] CellSet cells() const { return key_set(occupancy); }
};

HorizonView horizon_view(const Trajectory& plan, double t_c, double sensing_radius,
                         double footprint_radius, const CellGrid& grid);

/// C_ij = S_i ∩ S_j.
CellSet conflict_region(const OccupancyMap& map_i, const OccupancyMap& map_j);

struct CellConflict {
  CellIndex cell;
  IntervalSet overlap;
};

struct ConflictReport {
  std::set<int> conflict_neighbors;
  std::map<int, std::vector<CellConflict>> cells;

  [[nodiscard]] bool any() const { return !conflict_neighbors.empty(); }
};

/// Spatial-temporal conflicts of one robot against each neighbor's map.
ConflictReport detect_conflicts(const OccupancyMap& mine,
                                const std::map<int, OccupancyMap>& neighbor_maps);

/// True iff S_i ∩ S_j^+ is non-empty.
bool spatial_conflict(const CellSet& cells_i, const CellSet& updated_cells_j);

CellSet intersect(const CellSet& a, const CellSet& b);

}  // namespace mrmc
