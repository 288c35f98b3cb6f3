#include "ipp/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <unordered_map>

namespace ipp {

IdSet greedy_subset(const RewardFunction& fn, const IdSet& candidates,
                    SelectionBudget budget, const SensingDomain& dom) {
  IdSet selected;
  double remaining = budget.value;
  while (true) {
    double best_gain = 0.0;
    std::optional<LocationId> best;
    for (LocationId v : candidates) {
      if (selected.contains(v)) continue;
      if (dom.sensing_cost(v) > remaining) continue;
      if (!fn.evaluable(selected.with(v))) continue;
      const double g = marginal_gain(fn, selected, v);
      if (!best || g > best_gain) {
        best_gain = g;
        best = v;
      }
    }
    if (!best || best_gain <= 0.0) break;
    remaining -= dom.sensing_cost(*best);
    selected = selected.with(*best);
  }
  return selected;
}

namespace {

struct Insertion {
  std::size_t position = 0;  // insert before nodes[position]
  double delta_cost = 0.0;   // travel detour + sensing cost
};

Insertion cheapest_insertion(const Path& path, LocationId v,
                             const SensingDomain& dom) {
  Insertion best;
  best.delta_cost = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < path.nodes.size(); ++i) {
    const LocationId a = path.nodes[i - 1];
    const LocationId b = path.nodes[i];
    const double detour =
        dom.travel_cost(a, v) + dom.travel_cost(v, b) - dom.travel_cost(a, b);
    if (detour < best.delta_cost) {
      best.delta_cost = detour;
      best.position = i;
    }
  }
  best.delta_cost += dom.sensing_cost(v);
  return best;
}

std::optional<Path> greedy_path(const SensingDomain& dom,
                                const RewardFunction& fn,
                                const PlanQuery& query, bool benefit_cost) {
  if (dom.travel_cost(query.start, query.finish) > query.budget)
    return std::nullopt;

  Path path({query.start, query.finish});
  double cost = path_cost(path, dom);
  IdSet visited = path.visited();

  while (true) {
    std::optional<LocationId> best;
    Insertion best_ins;
    double best_score = 0.0;
    for (const Location& loc : dom.locations()) {
      const LocationId v = loc.id;
      if (visited.contains(v)) continue;
      if (!fn.evaluable(visited.with(v))) continue;
      const Insertion ins = cheapest_insertion(path, v, dom);
      if (cost + ins.delta_cost > query.budget) continue;
      const double gain = marginal_gain(fn, visited, v);
      if (gain <= 0.0) continue;
      const double score =
          benefit_cost ? (ins.delta_cost > 0.0
                              ? gain / ins.delta_cost
                              : std::numeric_limits<double>::infinity())
                       : gain;
      if (!best || score > best_score) {
        best = v;
        best_ins = ins;
        best_score = score;
      }
    }
    if (!best) break;
    path.nodes.insert(path.nodes.begin() + best_ins.position, *best);
    cost += best_ins.delta_cost;
    visited = visited.with(*best);
  }
  return path;
}

}  // namespace

std::optional<Path> greedy_benefit_cost(const SensingDomain& dom,
                                        const RewardFunction& fn,
                                        const PlanQuery& query) {
  return greedy_path(dom, fn, query, true);
}

std::optional<Path> greedy_reward(const SensingDomain& dom,
                                  const RewardFunction& fn,
                                  const PlanQuery& query) {
  return greedy_path(dom, fn, query, false);
}

namespace {

struct BruteForceState {
  BruteForceState(const SensingDomain& d, const RewardFunction& f,
                  const PlanQuery& q)
      : dom(d), fn(f), query(q) {}
  const SensingDomain& dom;
  const RewardFunction& fn;
  const PlanQuery& query;
  std::vector<LocationId> interior_candidates;
  std::vector<LocationId> current;
  std::vector<bool> used;
  double best_reward = -std::numeric_limits<double>::infinity();
  std::vector<LocationId> best_interior;
  std::unordered_map<IdSet, double, IdSetHash> reward_cache;
  std::vector<double> solo_gain;  // upper bound on each node's contribution

  double reward_of_set(const IdSet& set) {
    auto it = reward_cache.find(set);
    if (it != reward_cache.end()) return it->second;
    const double r =
        fn.evaluable(set) ? fn.eval(set)
                          : -std::numeric_limits<double>::infinity();
    reward_cache.emplace(set, r);
    return r;
  }

  void consider_current() {
    std::vector<LocationId> nodes;
    nodes.reserve(current.size() + 2);
    nodes.push_back(query.start);
    nodes.insert(nodes.end(), current.begin(), current.end());
    nodes.push_back(query.finish);
    const double r = reward_of_set(IdSet(nodes));
    if (r > best_reward) {
      best_reward = r;
      best_interior = current;
    }
  }

  void dfs(LocationId at, double cost_so_far) {
    consider_current();
    // Optimistic bound: current reward plus every still-reachable solo gain
    // (sound for submodular rewards; small slack absorbs MI's tolerance).
    const double optimistic =
        reward_of_current_upper(cost_so_far, at) + 1e-9;
    if (optimistic <= best_reward) return;
    for (std::size_t i = 0; i < interior_candidates.size(); ++i) {
      if (used[i]) continue;
      const LocationId v = interior_candidates[i];
      const double extended = cost_so_far + dom.travel_cost(at, v) +
                              dom.sensing_cost(v);
      if (extended + dom.travel_cost(v, query.finish) > query.budget) continue;
      used[i] = true;
      current.push_back(v);
      dfs(v, extended);
      current.pop_back();
      used[i] = false;
    }
  }

  double reward_of_current_upper(double cost_so_far, LocationId at) {
    double bound = 0.0;
    {
      std::vector<LocationId> nodes;
      nodes.push_back(query.start);
      nodes.insert(nodes.end(), current.begin(), current.end());
      nodes.push_back(query.finish);
      bound = reward_of_set(IdSet(std::move(nodes)));
    }
    for (std::size_t i = 0; i < interior_candidates.size(); ++i) {
      if (used[i]) continue;
      const LocationId v = interior_candidates[i];
      if (cost_so_far + dom.travel_cost(at, v) + dom.sensing_cost(v) +
              dom.travel_cost(v, query.finish) >
          query.budget)
        continue;
      bound += solo_gain[i];
    }
    return bound;
  }
};

}  // namespace

std::optional<Path> brute_force_path(const SensingDomain& dom,
                                     const RewardFunction& fn,
                                     const PlanQuery& query,
                                     const BruteForceOptions& opts) {
  if (dom.size() > opts.max_locations)
    throw ContractError("brute_force_path: domain exceeds the size guard (" +
                        std::to_string(opts.max_locations) + ")");
  if (dom.travel_cost(query.start, query.finish) > query.budget)
    return std::nullopt;

  BruteForceState st{dom, fn, query};
  for (const Location& loc : dom.locations()) {
    if (loc.id == query.start || loc.id == query.finish) continue;
    st.interior_candidates.push_back(loc.id);
  }
  std::sort(st.interior_candidates.begin(), st.interior_candidates.end());
  st.used.assign(st.interior_candidates.size(), false);

  // Submodularity makes the first-addition gain an upper bound on any later
  // contribution of the same node.
  const IdSet endpoints({query.start, query.finish});
  st.solo_gain.resize(st.interior_candidates.size(), 0.0);
  for (std::size_t i = 0; i < st.interior_candidates.size(); ++i) {
    const LocationId v = st.interior_candidates[i];
    st.solo_gain[i] = fn.evaluable(endpoints.with(v))
                          ? marginal_gain(fn, endpoints, v)
                          : 0.0;
    if (st.solo_gain[i] < 0.0) st.solo_gain[i] = 0.0;
  }

  st.dfs(query.start, 0.0);

  std::vector<LocationId> nodes;
  nodes.push_back(query.start);
  nodes.insert(nodes.end(), st.best_interior.begin(), st.best_interior.end());
  nodes.push_back(query.finish);
  return Path(std::move(nodes));
}

Fig3Instance make_fig3_instance(double b, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ContractError("fig3: eps must be in (0, 1)");
  const double ratio = b / eps;
  const long n = std::lround(ratio);
  if (n < 2 || std::abs(ratio - static_cast<double>(n)) > 1e-9)
    throw ContractError("fig3: B/eps must be an integer >= 2");

  Fig3Instance inst;
  inst.b = b;
  inst.eps = eps;

  std::vector<Location> locs;
  std::map<LocationId, double> rewards;
  LocationId next_id = 0;

  inst.start = next_id++;
  locs.push_back({inst.start, 0.0, 0.0, 0.0});
  rewards[inst.start] = 0.0;

  inst.far_node = next_id++;
  locs.push_back({inst.far_node, 0.0, b, 0.0});
  rewards[inst.far_node] = 1.0;

  // Ring of n locations with side exactly eps, nearest vertex (the gate) at
  // distance b/2 from the start along +x.
  const double r = eps / (2.0 * std::sin(std::numbers::pi / n));
  const double cx = b / 2.0 + r;
  std::vector<LocationId> ring_ids;
  for (long j = 0; j < n; ++j) {
    const double theta =
        std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(j) / n;
    const LocationId id = next_id++;
    double px = cx + r * std::cos(theta);
    double py = r * std::sin(theta);
    if (j == 0) {
      px = b / 2.0;  // exact gate distance
      py = 0.0;
    }
    locs.push_back({id, px, py, 0.0});
    rewards[id] = (j == 0) ? eps : 1.0;
    ring_ids.push_back(id);
    if (j == 0) inst.gate = id;
  }
  inst.ring = IdSet(ring_ids);

  std::vector<LocationId> series_ids;
  for (long j = 1; j <= n; ++j) {
    const LocationId id = next_id++;
    locs.push_back({id, -eps * static_cast<double>(j), 0.0, 0.0});
    rewards[id] = 2.0 * eps;
    series_ids.push_back(id);
  }
  inst.series = IdSet(series_ids);

  inst.domain = std::make_shared<SensingDomain>(std::move(locs));
  inst.reward = std::make_shared<ModularReward>(std::move(rewards));
  inst.query = PlanQuery{inst.start, inst.start, 2.0 * b};
  return inst;
}

}  // namespace ipp
