#pragma once

#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "mrmc/geometry.hpp"

namespace mrmc {

/// Grid coordinates of a cell: column along x, row along y.
struct CellIndex {
  int col = 0;
  int row = 0;
  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

using CellSet = std::set<CellIndex>;

std::string to_string(const CellIndex& c);

/// Uniform decomposition of a rectangle into closed square cells. Cells in
/// the last column/row are clipped to the bounds.
class CellGrid {
 public:
  CellGrid() = default;
  CellGrid(const Rect& bounds, double cell_size);

  [[nodiscard]] const Rect& bounds() const { return bounds_; }
  [[nodiscard]] double cell_size() const { return cell_size_; }
  [[nodiscard]] int cols() const { return cols_; }
  [[nodiscard]] int rows() const { return rows_; }
  [[nodiscard]] std::size_t size() const {
    return static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_);
  }

  [[nodiscard]] bool valid(const CellIndex& c) const {
    return c.col >= 0 && c.col < cols_ && c.row >= 0 && c.row < rows_;
  }
  [[nodiscard]] Rect box(const CellIndex& c) const;
  /// Center of the unclipped cell square.
  [[nodiscard]] Vec2 center(const CellIndex& c) const;
  /// The cell containing p; points on shared edges map to the upper cell,
  /// points on the outer boundary to the adjacent edge cell.
  [[nodiscard]] CellIndex locate(Vec2 p) const;
  [[nodiscard]] int linear(const CellIndex& c) const { return c.row * cols_ + c.col; }
  [[nodiscard]] CellIndex from_linear(int i) const { return {i % cols_, i / cols_}; }

  /// Inclusive index range of cells whose boxes may meet the closed rect.
  void candidate_range(const Rect& r, CellIndex& lo, CellIndex& hi) const;

 private:
  Rect bounds_{};
  double cell_size_ = 1.0;
  int cols_ = 0;
  int rows_ = 0;
};

CellGrid decompose(const Rect& bounds, double cell_size);

// Q(S): every cell whose closed box meets the closed region.
CellSet cells_intersecting(const CellGrid& grid, const Disc& region);
CellSet cells_intersecting(const CellGrid& grid, const Rect& region);
CellSet cells_intersecting(const CellGrid& grid, const Capsule& region);
CellSet cells_intersecting(const CellGrid& grid, Vec2 point);

/// Bounded rectangular workspace with closed rectangular obstacles.
class Workspace {
 public:
  Workspace() = default;
  Workspace(const Rect& bounds, std::vector<Rect> obstacles, double cell_size);

  [[nodiscard]] const Rect& bounds() const { return bounds_; }
  [[nodiscard]] std::span<const Rect> obstacles() const { return obstacles_; }
  [[nodiscard]] const CellGrid& grid() const { return grid_; }
  [[nodiscard]] double cell_size() const { return grid_.cell_size(); }

  [[nodiscard]] bool is_region_free(const Disc& region) const;
  [[nodiscard]] bool is_region_free(const Capsule& region) const;
  [[nodiscard]] bool is_region_free(const Rect& region) const;

  /// True if a cell's box is entirely covered by one obstacle.
  [[nodiscard]] bool cell_blocked(const CellIndex& c) const;

 private:
  Rect bounds_{};
  std::vector<Rect> obstacles_;
  CellGrid grid_;
};

bool is_region_free(const Workspace& ws, const Disc& region);

}  // namespace mrmc
