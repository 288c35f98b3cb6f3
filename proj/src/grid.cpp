#include "ipp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ipp {

CellGrid::CellGrid(std::vector<Cell> cells, double cell_width, double origin_x,
                   double origin_y, double cost_per_meter,
                   std::vector<std::pair<LocationId, int>> membership)
    : cells_(std::move(cells)),
      width_(cell_width),
      origin_x_(origin_x),
      origin_y_(origin_y),
      cost_per_meter_(cost_per_meter) {
  for (auto& [id, cell] : membership) cell_of_.emplace(id, cell);
}

double CellGrid::distance(int a, int b) const {
  const Cell& ca = cells_[a];
  const Cell& cb = cells_[b];
  return std::hypot(ca.cx - cb.cx, ca.cy - cb.cy) * cost_per_meter_;
}

int CellGrid::cell_of(LocationId id) const {
  auto it = cell_of_.find(id);
  if (it == cell_of_.end()) throw UnknownLocationError(id);
  return it->second;
}

CellGrid build_grid(const SensingDomain& dom, double cell_width) {
  if (!(cell_width > 0.0)) throw DomainError("cell width must be positive");

  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  for (const Location& loc : dom.locations()) {
    min_x = std::min(min_x, loc.x);
    min_y = std::min(min_y, loc.y);
  }

  auto coord_index = [cell_width](double v, double origin) {
    const double offset = v - origin;
    int idx = static_cast<int>(std::floor(offset / cell_width));
    // Boundary points belong to the lower-indexed cell.
    if (idx > 0 && offset <= static_cast<double>(idx) * cell_width) --idx;
    return idx;
  };

  std::map<std::pair<int, int>, std::vector<LocationId>> occupied;  // (iy,ix)
  for (const Location& loc : dom.locations()) {
    const int ix = coord_index(loc.x, min_x);
    const int iy = coord_index(loc.y, min_y);
    occupied[{iy, ix}].push_back(loc.id);
  }

  std::vector<Cell> cells;
  std::vector<std::pair<LocationId, int>> membership;
  cells.reserve(occupied.size());
  for (auto& [key, members] : occupied) {
    Cell cell;
    cell.id = static_cast<int>(cells.size());
    cell.iy = key.first;
    cell.ix = key.second;
    cell.cx = min_x + (cell.ix + 0.5) * cell_width;
    cell.cy = min_y + (cell.iy + 0.5) * cell_width;
    std::sort(members.begin(), members.end());
    cell.members = members;
    for (LocationId id : members) membership.emplace_back(id, cell.id);
    cells.push_back(std::move(cell));
  }
  return CellGrid(std::move(cells), cell_width, min_x, min_y,
                  dom.travel_cost_per_meter(), std::move(membership));
}

double cell_width_for_count(const SensingDomain& dom, std::size_t cells) {
  if (cells == 0) throw DomainError("cell count must be positive");
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = -min_x;
  for (const Location& loc : dom.locations()) {
    min_x = std::min(min_x, loc.x);
    max_x = std::max(max_x, loc.x);
    min_y = std::min(min_y, loc.y);
    max_y = std::max(max_y, loc.y);
  }
  const double area = std::max(max_x - min_x, 1e-9) *
                      std::max(max_y - min_y, 1e-9);
  const double base = std::sqrt(area / static_cast<double>(cells));

  double best_width = base;
  std::size_t best_err = std::numeric_limits<std::size_t>::max();
  for (int i = -20; i <= 20; ++i) {
    const double w = base * std::pow(1.05, i);
    const std::size_t n = build_grid(dom, w).size();
    const std::size_t err = n > cells ? n - cells : cells - n;
    if (err < best_err) {
      best_err = err;
      best_width = w;
    }
  }
  return best_width;
}

IdSet CellPath::all_selected() const {
  IdSet all;
  for (const IdSet& s : selections) all = all.united(s);
  return all;
}

CellPath concat_cell_paths(const CellPath& left, const CellPath& right,
                           const CellGrid& grid) {
  if (left.cells.empty() || right.cells.empty())
    throw ContractError("concat_cell_paths: empty side");
  if (left.cells.back() != right.cells.front())
    throw ContractError("concat_cell_paths: middle cell mismatch");
  CellPath out = left;
  out.selections.back() = out.selections.back().united(right.selections.front());
  for (std::size_t i = 1; i < right.cells.size(); ++i) {
    if (right.cells[i] == out.cells.back()) {
      out.selections.back() = out.selections.back().united(right.selections[i]);
      continue;
    }
    out.cells.push_back(right.cells[i]);
    out.selections.push_back(right.selections[i]);
  }
  out.finish_location = right.finish_location;
  out.spent_experimental = left.spent_experimental + right.spent_experimental;
  out.spent_travel = 0.0;
  for (std::size_t i = 1; i < out.cells.size(); ++i)
    out.spent_travel += grid.distance(out.cells[i - 1], out.cells[i]);
  return out;
}

Path expand_to_tour(const CellPath& cp, const CellGrid&,
                    const SensingDomain& dom) {
  std::vector<LocationId> nodes;
  nodes.push_back(cp.start_location);
  LocationId at = cp.start_location;

  for (const IdSet& sel : cp.selections) {
    std::vector<LocationId> remaining(sel.begin(), sel.end());
    while (!remaining.empty()) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        const double d = dom.travel_cost(at, remaining[i]);
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      at = remaining[best];
      remaining.erase(remaining.begin() + best);
      if (nodes.back() != at) nodes.push_back(at);
    }
  }
  if (nodes.size() < 2 || nodes.back() != cp.finish_location)
    nodes.push_back(cp.finish_location);
  return Path(std::move(nodes));
}

Path two_opt_smooth(const Path& path, const SensingDomain& dom) {
  if (path.nodes.size() < 4) return path;
  Path out = path;
  auto& nodes = out.nodes;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 1; i + 1 < nodes.size() && !improved; ++i) {
      for (std::size_t j = i + 1; j + 1 < nodes.size() && !improved; ++j) {
        // Reverse nodes[i..j]; sensing costs are order-invariant.
        const double before = dom.travel_cost(nodes[i - 1], nodes[i]) +
                              dom.travel_cost(nodes[j], nodes[j + 1]);
        const double after = dom.travel_cost(nodes[i - 1], nodes[j]) +
                             dom.travel_cost(nodes[i], nodes[j + 1]);
        if (after < before - 1e-12 * (1.0 + before)) {
          std::reverse(nodes.begin() + i, nodes.begin() + j + 1);
          improved = true;
        }
      }
    }
  }
  return out;
}

double sd_budget(double b, double l) {
  return 2.0 * std::sqrt(2.0) * b + 4.0 * l;
}

double planned_cost_bound(double b, double l, double c_exp,
                          std::size_t n_cells, bool linear_splits) {
  if (!(c_exp > 0.0)) return std::numeric_limits<double>::infinity();
  double bound = 2.0 * sd_budget(b, l) * (1.0 + l * std::sqrt(2.0) / c_exp);
  if (!linear_splits)
    bound *= std::pow(static_cast<double>(n_cells), std::log2(1.5));
  return bound;
}

}  // namespace ipp
