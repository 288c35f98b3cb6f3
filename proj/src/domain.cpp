#include "ipp/domain.hpp"

#include <cmath>
#include <limits>

#include "ipp/simd.hpp"

namespace ipp {

SensingDomain::SensingDomain(std::vector<Location> locations,
                             double travel_cost_per_meter,
                             std::optional<double> uniform_experiment_cost)
    : locations_(std::move(locations)),
      travel_cost_per_meter_(travel_cost_per_meter),
      uniform_cost_(uniform_experiment_cost) {
  if (locations_.size() < 2)
    throw DomainError("domain needs at least 2 locations");
  if (!(travel_cost_per_meter_ > 0.0))
    throw DomainError("travel_cost_per_meter must be positive");
  if (uniform_cost_ && !(*uniform_cost_ >= 0.0))
    throw DomainError("uniform experiment cost must be nonnegative");

  const std::size_t n = locations_.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Location& loc = locations_[i];
    if (!(loc.sensing_cost >= 0.0))
      throw DomainError("sensing cost must be nonnegative");
    if (!index_.emplace(loc.id, i).second)
      throw DomainError("duplicate location id " + std::to_string(loc.id));
    xs[i] = loc.x;
    ys[i] = loc.y;
  }

  travel_.resize(n * n);
  min_travel_ = std::numeric_limits<double>::infinity();
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    simd::sq_dist(xs.data(), ys.data(), n, xs[i], ys[i], d2.data());
    for (std::size_t j = 0; j < n; ++j) {
      const double c = std::sqrt(d2[j]) * travel_cost_per_meter_;
      travel_[i * n + j] = c;
      if (c > 0.0 && c < min_travel_) min_travel_ = c;
    }
  }
  if (!std::isfinite(min_travel_)) min_travel_ = 0.0;
}

std::size_t SensingDomain::index_of(LocationId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownLocationError(id);
  return it->second;
}

IdSet SensingDomain::all_ids() const {
  std::vector<LocationId> ids;
  ids.reserve(locations_.size());
  for (const Location& loc : locations_) ids.push_back(loc.id);
  return IdSet(std::move(ids));
}

double SensingDomain::sensing_cost(LocationId id) const {
  const Location& loc = location(id);
  return uniform_cost_ ? *uniform_cost_ : loc.sensing_cost;
}

double SensingDomain::travel_cost(LocationId a, LocationId b) const {
  return travel_[index_of(a) * size() + index_of(b)];
}

double path_cost(const Path& path, const SensingDomain& dom) {
  if (path.nodes.size() < 2) throw DomainError("path needs at least 2 nodes");
  double cost = 0.0;
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    cost += dom.travel_cost(path.nodes[i - 1], path.nodes[i]);
    if (i + 1 < path.nodes.size()) cost += dom.sensing_cost(path.nodes[i]);
  }
  return cost;
}

bool feasible(const Path& path, const PlanQuery& query,
              const SensingDomain& dom) {
  if (path.nodes.size() < 2) return false;
  if (path.nodes.front() != query.start || path.nodes.back() != query.finish)
    return false;
  return path_cost(path, dom) <= query.budget;
}

}  // namespace ipp
