#ifndef IPP_DOMAIN_HPP
#define IPP_DOMAIN_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace ipp {

using LocationId = int;

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownLocationError : DomainError {
  explicit UnknownLocationError(LocationId id)
      : DomainError("unknown location id " + std::to_string(id)) {}
};

struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

// Sorted, deduplicated set of location ids. Canonical order makes the set
// usable as a cache key and keeps reward evaluations deterministic.
class IdSet {
 public:
  IdSet() = default;
  IdSet(std::initializer_list<LocationId> ids) : ids_(ids) { normalize(); }
  explicit IdSet(std::vector<LocationId> ids) : ids_(std::move(ids)) {
    normalize();
  }

  bool contains(LocationId id) const {
    return std::binary_search(ids_.begin(), ids_.end(), id);
  }
  bool empty() const { return ids_.empty(); }
  std::size_t size() const { return ids_.size(); }
  const std::vector<LocationId>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  IdSet with(LocationId id) const {
    IdSet out = *this;
    auto it = std::lower_bound(out.ids_.begin(), out.ids_.end(), id);
    if (it == out.ids_.end() || *it != id) out.ids_.insert(it, id);
    return out;
  }
  IdSet united(const IdSet& other) const {
    IdSet out;
    out.ids_.reserve(size() + other.size());
    std::set_union(begin(), end(), other.begin(), other.end(),
                   std::back_inserter(out.ids_));
    return out;
  }
  bool is_subset_of(const IdSet& other) const {
    return std::includes(other.begin(), other.end(), begin(), end());
  }
  bool operator==(const IdSet& other) const = default;

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (LocationId id : ids_) {
      h ^= static_cast<std::uint64_t>(id) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }

 private:
  void normalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }
  std::vector<LocationId> ids_;
};

struct IdSetHash {
  std::size_t operator()(const IdSet& s) const { return s.hash(); }
};

struct Location {
  LocationId id = 0;
  double x = 0.0;
  double y = 0.0;
  // Cost of taking a measurement here, in the same units as travel. Zero is
  // allowed: pure-orienteering fixtures carry travel costs only.
  double sensing_cost = 0.0;
};

// Discrete sensing locations with a Euclidean travel metric. Immutable after
// construction; travel costs are precomputed.
class SensingDomain {
 public:
  SensingDomain(std::vector<Location> locations,
                double travel_cost_per_meter = 1.0,
                std::optional<double> uniform_experiment_cost = std::nullopt);

  std::size_t size() const { return locations_.size(); }
  const std::vector<Location>& locations() const { return locations_; }
  const Location& location(LocationId id) const {
    return locations_[index_of(id)];
  }
  std::size_t index_of(LocationId id) const;
  bool has(LocationId id) const { return index_.count(id) != 0; }
  IdSet all_ids() const;

  double sensing_cost(LocationId id) const;
  double travel_cost(LocationId a, LocationId b) const;
  double travel_cost_per_meter() const { return travel_cost_per_meter_; }
  std::optional<double> uniform_experiment_cost() const {
    return uniform_cost_;
  }
  // Smallest nonzero pairwise travel cost; used for cost quantization.
  double min_positive_travel_cost() const { return min_travel_; }

 private:
  std::vector<Location> locations_;
  std::unordered_map<LocationId, std::size_t> index_;
  double travel_cost_per_meter_;
  std::optional<double> uniform_cost_;
  std::vector<double> travel_;  // n*n
  double min_travel_ = 0.0;
};

// Ordered location sequence; first node is the start, last the finish.
// Revisits are allowed. Reward of a path depends only on the set of distinct
// visited locations; cost is positional.
struct Path {
  std::vector<LocationId> nodes;

  Path() = default;
  explicit Path(std::vector<LocationId> n) : nodes(std::move(n)) {}
  IdSet visited() const { return IdSet(nodes); }
};

struct PlanQuery {
  LocationId start = 0;
  LocationId finish = 0;
  double budget = 0.0;
};

// Sum of interior sensing costs plus travel along the sequence; a two-node
// path pays travel only.
double path_cost(const Path& path, const SensingDomain& dom);

bool feasible(const Path& path, const PlanQuery& query,
              const SensingDomain& dom);

}  // namespace ipp

#endif
