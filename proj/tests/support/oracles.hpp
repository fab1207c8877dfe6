#pragma once

// Slow reference implementations used to check the library. They share as
// little code with it as practical: cell membership is recomputed from box
// distances, time is sampled densely, and search problems are enumerated
// without heuristics or pruning.

#include <optional>
#include <random>
#include <set>
#include <vector>

#include "mrmc/agent.hpp"
#include "mrmc/spacetime.hpp"

namespace mrmc::oracle {

/// Cells whose closed box meets the closed disc, by scanning every cell.
CellSet disc_cells(const CellGrid& grid, Vec2 center, double radius);

/// Cells touched by the footprint at some 1 ms sample in [t0, t1].
CellSet dense_cells(const PositionTrajectory& p, double t0, double t1, double radius, const CellGrid& grid,
                    double step = 1e-3);

/// Cells where the two footprints are present at the same 1 ms sample.
CellSet dense_conflicts(const PositionTrajectory& a, double ra, const PositionTrajectory& b, double rb, double t0,
                        double t1, const CellGrid& grid, double step = 1e-3);

/// True if some 1 ms sample puts the footprint in `cell` while `times`
/// contains that sample.
bool dense_hits(const PositionTrajectory& p, double radius, const CellGrid& grid, const CellIndex& cell,
                const Interval& times, double step = 1e-3);

/// Plan start for a robot at rest at the path origin.
PlanStart rest_start(const Path& path, double t0, double dt);

/// Exhaustive minimum arrival (in plan steps) of the stop-at-the-end speed
/// profile problem. Transitions come from PlanBuilder; a move is blocked if
/// the capsule swept over it (radius + inflate) meets a window cell during
/// the move's time span. Arrival requires the end point to stay clear of
/// windows afterwards.
std::optional<int> brute_force_profile(const Path& path, const LatticeSpec& lattice, double radius,
                                       const CellGrid& grid, const WindowMap& windows, double t0,
                                       double inflate = kGeomEps);

/// Dijkstra over SpaceTimeLattice::successors up to its layer limit.
std::optional<int> brute_force_space_time(SpaceTimeLattice& lattice, double start_heading);

/// Random straight-segment motion inside `bounds`, sampled every dt.
PositionTrajectory random_motion(std::mt19937_64& rng, const Rect& bounds, double dt, double duration,
                                 double v_max);

}  // namespace mrmc::oracle
