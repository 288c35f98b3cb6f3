#include "ipp/rgreedy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

namespace ipp {

double cost_quantum(const std::vector<double>& costs) {
  double min_pos = std::numeric_limits<double>::infinity();
  double max_cost = 0.0;
  for (double c : costs) {
    if (c > 0.0) min_pos = std::min(min_pos, c);
    max_cost = std::max(max_cost, c);
  }
  if (!std::isfinite(min_pos)) return 1.0;  // no positive costs anywhere

  const double tol = 1e-9 * std::max(max_cost, 1.0);
  double g = 0.0;
  for (double c : costs) {
    if (c <= 0.0) continue;
    double a = c;
    double b = g;
    while (b > tol) {
      double r = std::fmod(a, b);
      if (r < tol || b - r < tol) r = 0.0;
      a = b;
      b = r;
    }
    g = a;
    if (g < min_pos / 100.0) return min_pos / 100.0;
  }
  return g;
}

namespace {

using Quantized = std::int64_t;

struct MemoKey {
  int s = 0;
  int t = 0;
  Quantized budget = 0;
  int iter = 0;
  IdSet committed;
  bool operator==(const MemoKey&) const = default;
};

struct MemoKeyHash {
  std::size_t operator()(const MemoKey& k) const {
    std::uint64_t h = k.committed.hash();
    h ^= static_cast<std::uint64_t>(k.s) * 0x9e3779b97f4a7c15ull;
    h ^= static_cast<std::uint64_t>(k.t) * 0xc2b2ae3d27d4eb4full;
    h ^= static_cast<std::uint64_t>(k.budget) * 0x165667b19e3779f9ull;
    h ^= static_cast<std::uint64_t>(k.iter) * 0x27d4eb2f165667c5ull;
    return h;
  }
};

struct Search {
  const SensingDomain& dom;
  const RewardFunction& fn;
  std::size_t n;
  std::vector<LocationId> ids;       // index -> id
  std::vector<Quantized> arrival;    // n*n: quantized C(u,v) + C(v)
  std::unordered_map<MemoKey, std::optional<Path>, MemoKeyHash> memo;
  std::unordered_map<IdSet, double, IdSetHash> eval_cache;
  bool memoize;

  Search(const SensingDomain& d, const RewardFunction& f, double quantum,
         bool use_memo)
      : dom(d), fn(f), n(d.size()), memoize(use_memo) {
    ids.reserve(n);
    for (const Location& loc : d.locations()) ids.push_back(loc.id);
    std::sort(ids.begin(), ids.end());
    arrival.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double c =
            dom.travel_cost(ids[i], ids[j]) + dom.sensing_cost(ids[j]);
        arrival[i * n + j] =
            static_cast<Quantized>(std::ceil(c / quantum - 1e-9));
      }
    }
  }

  double value(const IdSet& set) {
    if (!fn.evaluable(set)) return -std::numeric_limits<double>::infinity();
    auto it = eval_cache.find(set);
    if (it != eval_cache.end()) return it->second;
    const double v = fn.eval(set);
    eval_cache.emplace(set, v);
    return v;
  }

  // Reward of a candidate node set relative to the committed set.
  double residual_value(const IdSet& set, const IdSet& committed) {
    const double base = committed.empty() ? 0.0 : value(committed);
    const double total = value(set.united(committed));
    return total - base;
  }

  std::optional<Path> run(int s, int t, Quantized budget, const IdSet& committed,
                          int iter) {
    // Budgets are in the arrival metric: each hop u->v pays quantized
    // C(u,v) + C(v), so concatenation at a middle node is purely additive.
    if (arrival[s * n + t] > budget) return std::nullopt;

    MemoKey key;
    if (memoize) {
      key = MemoKey{s, t, budget, iter, committed};
      auto it = memo.find(key);
      if (it != memo.end()) return it->second;
    }

    Path best({ids[s], ids[t]});
    if (iter == 0) {
      if (memoize) memo.emplace(std::move(key), best);
      return best;
    }

    double best_value = residual_value(best.visited(), committed);
    for (std::size_t m = 0; m < n; ++m) {
      const Quantized to_mid = arrival[s * n + m];
      const Quantized mid_to_t = arrival[m * n + t];
      if (to_mid + mid_to_t > budget) continue;
      for (Quantized b1 = to_mid; b1 <= budget - mid_to_t; ++b1) {
        auto first = run(s, static_cast<int>(m), b1, committed, iter - 1);
        if (!first) continue;
        auto second = run(static_cast<int>(m), t, budget - b1,
                          committed.united(first->visited()), iter - 1);
        if (!second) continue;
        const IdSet joint = first->visited().united(second->visited());
        const double v = residual_value(joint, committed);
        if (v > best_value) {
          best_value = v;
          best.nodes = first->nodes;
          best.nodes.insert(best.nodes.end(), second->nodes.begin() + 1,
                            second->nodes.end());
        }
      }
    }
    if (memoize) memo.emplace(std::move(key), best);
    return best;
  }
};

}  // namespace

std::optional<Path> recursive_greedy(const SensingDomain& dom,
                                     const RewardFunction& fn,
                                     const PlanQuery& query, int iter,
                                     const IdSet& committed,
                                     const RecursiveGreedyOptions& opts) {
  if (dom.size() > opts.max_locations)
    throw ContractError("recursive_greedy: domain exceeds the size guard (" +
                        std::to_string(opts.max_locations) + ")");
  if (iter < 0) throw ContractError("recursive_greedy: negative depth");

  double quantum;
  if (opts.resolution) {
    quantum = *opts.resolution;
    if (!(quantum > 0.0))
      throw ContractError("recursive_greedy: resolution must be positive");
  } else {
    std::vector<double> costs;
    costs.reserve(dom.size() * dom.size());
    for (const Location& a : dom.locations()) {
      costs.push_back(a.sensing_cost);
      for (const Location& b : dom.locations()) {
        if (a.id != b.id) costs.push_back(dom.travel_cost(a.id, b.id));
      }
    }
    quantum = cost_quantum(costs);
  }

  Search search(dom, fn, quantum, opts.memoize);
  const int s = static_cast<int>(
      std::distance(search.ids.begin(),
                    std::lower_bound(search.ids.begin(), search.ids.end(),
                                     query.start)));
  const int t = static_cast<int>(
      std::distance(search.ids.begin(),
                    std::lower_bound(search.ids.begin(), search.ids.end(),
                                     query.finish)));
  dom.index_of(query.start);
  dom.index_of(query.finish);

  const double inflated = query.budget + dom.sensing_cost(query.finish);
  const Quantized budget =
      static_cast<Quantized>(std::floor(inflated / quantum + 1e-9));
  return search.run(s, t, budget, committed, iter);
}

}  // namespace ipp
