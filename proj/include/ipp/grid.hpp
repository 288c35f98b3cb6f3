#ifndef IPP_GRID_HPP
#define IPP_GRID_HPP

#include <vector>

#include "ipp/domain.hpp"

namespace ipp {

struct Cell {
  int id = 0;
  int ix = 0;
  int iy = 0;
  double cx = 0.0;  // geometric center of the grid square, meters
  double cy = 0.0;
  std::vector<LocationId> members;  // sorted by id
};

// Uniform axis-aligned square decomposition of the domain's bounding box,
// anchored at the minimum corner. Empty cells are dropped; points exactly on
// a cell boundary go to the lower-indexed cell. Immutable after build.
class CellGrid {
 public:
  CellGrid(std::vector<Cell> cells, double cell_width, double origin_x,
           double origin_y, double cost_per_meter,
           std::vector<std::pair<LocationId, int>> membership);

  std::size_t size() const { return cells_.size(); }
  const std::vector<Cell>& cells() const { return cells_; }
  const Cell& cell(int id) const { return cells_[id]; }
  double cell_width() const { return width_; }
  // Cell width and centroid distances expressed in travel-cost units.
  double cell_width_cost() const { return width_ * cost_per_meter_; }
  double distance(int a, int b) const;
  int cell_of(LocationId id) const;

 private:
  std::vector<Cell> cells_;
  double width_;
  double origin_x_, origin_y_;
  double cost_per_meter_;
  std::unordered_map<LocationId, int> cell_of_;
};

CellGrid build_grid(const SensingDomain& dom, double cell_width);

// Choose a cell width so the number of nonempty cells lands close to the
// requested count.
double cell_width_for_count(const SensingDomain& dom, std::size_t cells);

// One SD-MIPP solution: a cell sequence with per-cell selected locations and
// its budget accounting.
struct CellPath {
  std::vector<int> cells;         // consecutive entries distinct
  std::vector<IdSet> selections;  // aligned with cells
  LocationId start_location = 0;
  LocationId finish_location = 0;
  double spent_experimental = 0.0;  // sum of sensing costs of selections
  double spent_travel = 0.0;        // sum of centroid hops, cost units

  std::size_t hops() const { return cells.empty() ? 0 : cells.size() - 1; }
  IdSet all_selected() const;
};

// Concatenate two cell paths sharing a middle cell.
CellPath concat_cell_paths(const CellPath& left, const CellPath& right,
                           const CellGrid& grid);

// Flatten a cell path into a location path: start, then each visited cell's
// selections in nearest-neighbor order from the previous point, then finish.
// Cost is bounded by twice the weight of the centroid-chain-plus-stars tree
// the sequence describes.
Path expand_to_tour(const CellPath& cp, const CellGrid& grid,
                    const SensingDomain& dom);

// First-improvement 2-opt over interior segments until no move improves.
// Keeps endpoints and the visited multiset; never increases cost.
Path two_opt_smooth(const Path& path, const SensingDomain& dom);

// Budget sufficient for the spatially decomposed problem to contain the
// original optimum: 2*sqrt(2)*B + 4L.
double sd_budget(double b, double l);

// Cost ceiling for the final smoothed path: 2*(2*sqrt(2)B + 4L)(1 +
// L*sqrt(2)/c_exp), times N^(log2 3/2) under exponential splits. Returns
// +infinity when c_exp is not positive.
double planned_cost_bound(double b, double l, double c_exp,
                          std::size_t n_cells, bool linear_splits);

}  // namespace ipp

#endif
