#include "ipp/esip.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <future>
#include <limits>

#include "ipp/rgreedy.hpp"

namespace ipp {

std::vector<double> budget_splits(double b_e, const SplitSchedule& schedule,
                                  double quantum) {
  std::vector<double> out{0.0};
  if (b_e <= 0.0) return out;
  const double q = quantum > 0.0 ? quantum : b_e;
  const double tol = 1e-9 * std::max(b_e, q);

  switch (schedule.kind) {
    case SplitKind::linear:
      for (double v = q; v < b_e - tol; v += q) out.push_back(v);
      break;
    case SplitKind::exp_two_sided:
    case SplitKind::exp_one_sided:
      for (double step = q; step < b_e - tol; step *= 2.0)
        out.push_back(step);
      if (schedule.kind == SplitKind::exp_two_sided) {
        for (double step = q; b_e - step > tol; step *= 2.0)
          out.push_back(b_e - step);
      }
      break;
  }
  out.push_back(b_e);
  std::sort(out.begin(), out.end());
  std::vector<double> dedup;
  for (double v : out) {
    if (dedup.empty() || v - dedup.back() > tol) dedup.push_back(v);
  }
  return dedup;
}

double sensing_cost_quantum(const SensingDomain& dom) {
  std::vector<double> costs;
  for (const Location& loc : dom.locations()) {
    const double c = dom.sensing_cost(loc.id);
    if (c > 0.0) costs.push_back(c);
  }
  if (costs.empty()) return 1.0;
  return cost_quantum(costs);
}

std::size_t EsipSearch::UbKeyHash::operator()(const UbKey& k) const {
  std::uint64_t h = k.active.hash();
  h ^= static_cast<std::uint64_t>(k.cs) * 0x9e3779b97f4a7c15ull;
  h ^= static_cast<std::uint64_t>(k.ct) * 0xc2b2ae3d27d4eb4full;
  h ^= std::bit_cast<std::uint64_t>(k.b_e) * 0x165667b19e3779f9ull;
  h ^= static_cast<std::uint64_t>(k.iter) * 0x27d4eb2f165667c5ull;
  return h;
}

EsipSearch::EsipSearch(const SensingDomain& dom, const CellGrid& grid,
                       std::shared_ptr<const RewardFunction> fn,
                       EsipOptions opts)
    : dom_(dom), grid_(grid), fn_(std::move(fn)), opts_(std::move(opts)) {
  if (!(opts_.bnb.alpha >= 1.0))
    throw ContractError("bnb alpha must be >= 1");
  quantum_ = opts_.cost_quantum ? *opts_.cost_quantum
                                : sensing_cost_quantum(dom_);
  if (!(quantum_ > 0.0)) throw ContractError("cost quantum must be positive");

  bool uniform = true;
  const double first_cost = dom_.sensing_cost(dom_.locations().front().id);
  for (const Location& loc : dom_.locations()) {
    if (dom_.sensing_cost(loc.id) != first_cost) {
      uniform = false;
      break;
    }
  }
  if (uniform && first_cost > 0.0) uniform_sensing_cost_ = first_cost;
  begin({});
}

void EsipSearch::begin(const IdSet& committed) {
  oracle_ = make_gain_oracle(fn_, committed);
  ub_memo_.clear();
  ub_prefix_memo_.clear();
  start_time_ = std::chrono::steady_clock::now();
  deadline_.reset();
  if (opts_.bnb.time_limit_seconds) {
    deadline_ = start_time_ +
                std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                    std::chrono::duration<double>(
                        *opts_.bnb.time_limit_seconds));
  }
}

double EsipSearch::radius(int iter) const {
  return std::ldexp(grid_.cell_width_cost(), iter);
}

bool EsipSearch::expired() const {
  return deadline_ && std::chrono::steady_clock::now() > *deadline_;
}

double EsipSearch::elapsed_seconds() const {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start_time_)
      .count();
}

void EsipSearch::trace(int depth, double ub, double lb, bool pruned) const {
  if (opts_.trace)
    opts_.trace->emit({depth, ub, lb, pruned, elapsed_seconds()});
}

bool EsipSearch::better(const CellSearchResult& a,
                        const CellSearchResult& b) const {
  if (a.reward != b.reward) return a.reward > b.reward;
  if (a.path.cells.size() != b.path.cells.size())
    return a.path.cells.size() < b.path.cells.size();
  return a.path.cells < b.path.cells;
}

IdSet EsipSearch::greedy_pick(const std::vector<LocationId>& candidates,
                              double b_e) {
  std::vector<LocationId> picked;
  std::vector<double> gains(candidates.size());
  std::vector<char> usable(candidates.size());
  double remaining = b_e;
  while (true) {
    auto evaluate = [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const LocationId v = candidates[i];
        usable[i] = oracle_->evaluable(v) && dom_.sensing_cost(v) <= remaining;
        gains[i] = usable[i] ? oracle_->gain(v) : 0.0;
      }
    };
    if (opts_.threads > 1 && candidates.size() >= 16) {
      const std::size_t chunks = static_cast<std::size_t>(opts_.threads);
      std::vector<std::future<void>> futures;
      const std::size_t step = (candidates.size() + chunks - 1) / chunks;
      for (std::size_t c = 0; c * step < candidates.size(); ++c) {
        const std::size_t b = c * step;
        const std::size_t e = std::min(candidates.size(), b + step);
        futures.push_back(
            std::async(std::launch::async, [&, b, e] { evaluate(b, e); }));
      }
      for (auto& f : futures) f.get();
    } else {
      evaluate(0, candidates.size());
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!usable[i]) continue;
      if (!best || gains[i] > gains[*best]) best = i;
    }
    if (!best || gains[*best] <= 0.0) break;
    const LocationId v = candidates[*best];
    oracle_->push(v);
    picked.push_back(v);
    remaining -= dom_.sensing_cost(v);
  }
  oracle_->pop(picked.size());
  return IdSet(std::move(picked));
}

CellSearchResult EsipSearch::base_selection(int cs, int ct, double b_e) {
  std::vector<LocationId> candidates = grid_.cell(cs).members;
  if (ct != cs) {
    const auto& more = grid_.cell(ct).members;
    candidates.insert(candidates.end(), more.begin(), more.end());
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
  }

  const IdSet picked = greedy_pick(candidates, b_e);

  CellSearchResult res;
  res.path.cells = (cs == ct) ? std::vector<int>{cs} : std::vector<int>{cs, ct};
  res.path.selections.assign(res.path.cells.size(), IdSet{});
  double spent = 0.0;
  for (LocationId v : picked) {
    const int cell = grid_.cell_of(v);
    for (std::size_t i = 0; i < res.path.cells.size(); ++i) {
      if (res.path.cells[i] == cell) {
        res.path.selections[i] = res.path.selections[i].with(v);
        break;
      }
    }
    spent += dom_.sensing_cost(v);
  }
  res.path.spent_experimental = spent;
  res.path.spent_travel = (cs == ct) ? 0.0 : grid_.distance(cs, ct);
  res.reward = oracle_->push_set(picked);
  oracle_->pop(picked.size());
  return res;
}

double EsipSearch::calculate_ub(int cs, int ct, double b_e, int iter) {
  if (b_e <= 0.0) return 0.0;
  static const double kInvGreedyFactor = 1.0 / (1.0 - std::exp(-1.0));

  if (uniform_sensing_cost_) {
    UbKey key{cs, ct, 0.0, iter, oracle_->active()};
    auto it = ub_prefix_memo_.find(key);
    if (it == ub_prefix_memo_.end()) {
      const double reach = radius(iter);
      std::vector<LocationId> candidates;
      for (const Cell& c : grid_.cells()) {
        if (grid_.distance(cs, c.id) + grid_.distance(c.id, ct) <= reach)
          candidates.insert(candidates.end(), c.members.begin(),
                            c.members.end());
      }
      std::sort(candidates.begin(), candidates.end());

      // One unconstrained greedy pass, recording the value every smaller
      // budget would have reached (the pick order is budget-independent
      // under a uniform cost).
      UbPrefix prefix;
      prefix.unit_cost = *uniform_sensing_cost_;
      double cum = 0.0;
      while (true) {
        std::optional<LocationId> best;
        double best_gain = 0.0;
        for (LocationId v : candidates) {
          if (!oracle_->evaluable(v)) continue;
          const double g = oracle_->gain(v);
          if (!best || g > best_gain) {
            best = v;
            best_gain = g;
          }
        }
        if (!best || best_gain <= 0.0) break;
        oracle_->push(*best);
        cum += best_gain;
        prefix.cumulative.push_back(cum);
      }
      oracle_->pop(prefix.cumulative.size());
      it = ub_prefix_memo_.emplace(std::move(key), std::move(prefix)).first;
    }
    const UbPrefix& prefix = it->second;
    const std::size_t affordable = static_cast<std::size_t>(
        std::floor(b_e / prefix.unit_cost + 1e-9));
    const std::size_t k = std::min(affordable, prefix.cumulative.size());
    return (k == 0 ? 0.0 : prefix.cumulative[k - 1]) * kInvGreedyFactor;
  }

  UbKey key{cs, ct, b_e, iter, oracle_->active()};
  auto it = ub_memo_.find(key);
  if (it != ub_memo_.end()) return it->second;

  const double reach = radius(iter);
  std::vector<LocationId> candidates;
  for (const Cell& c : grid_.cells()) {
    if (grid_.distance(cs, c.id) + grid_.distance(c.id, ct) <= reach) {
      candidates.insert(candidates.end(), c.members.begin(), c.members.end());
    }
  }
  std::sort(candidates.begin(), candidates.end());

  double ub = 0.0;
  if (!candidates.empty()) {
    const IdSet picked = greedy_pick(candidates, b_e);
    const double greedy_value = oracle_->push_set(picked);
    oracle_->pop(picked.size());
    // Greedy is (1 - 1/e)-approximate for the relaxed selection problem, so
    // scaling it back up bounds any feasible subpath.
    ub = greedy_value / (1.0 - std::exp(-1.0));
  }
  ub_memo_.emplace(std::move(key), ub);
  return ub;
}

bool EsipSearch::splittable(const std::vector<int>& seq, std::size_t lo,
                            std::size_t hi, int iter) const {
  if (grid_.distance(seq[lo], seq[hi]) > radius(iter)) return false;
  if (hi - lo <= 1) return true;
  if (iter == 0) return false;
  const std::size_t mid = lo + (hi - lo + 1) / 2;
  return splittable(seq, lo, mid, iter - 1) &&
         splittable(seq, mid, hi, iter - 1);
}

std::optional<CellSearchResult> EsipSearch::heuristic_op(int cs, int ct,
                                                         double b_e,
                                                         int iter) {
  if (grid_.distance(cs, ct) > radius(iter)) return std::nullopt;

  std::vector<int> seq;
  seq.push_back(cs);
  if (ct != cs) seq.push_back(ct);

  const std::size_t max_hops = static_cast<std::size_t>(1) << std::min(iter, 30);
  const double travel_cap = radius(iter);

  // Static per-cell gain proxy: the best single-location gain w.r.t. the
  // current committed state. Cells outside the reachability ellipse can
  // never be inserted.
  std::vector<double> cell_gain(grid_.size(), 0.0);
  for (const Cell& c : grid_.cells()) {
    if (grid_.distance(cs, c.id) + grid_.distance(c.id, ct) > travel_cap)
      continue;
    double g = 0.0;
    for (LocationId v : c.members) {
      if (!oracle_->evaluable(v)) continue;
      g = std::max(g, oracle_->gain(v));
    }
    cell_gain[c.id] = g;
  }

  auto seq_travel = [&](const std::vector<int>& s) {
    double t = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
      t += grid_.distance(s[i - 1], s[i]);
    return t;
  };

  double travel = seq_travel(seq);
  while (true) {
    double best_ratio = 0.0;
    std::optional<std::pair<int, std::size_t>> best;  // (cell, position)
    for (const Cell& c : grid_.cells()) {
      if (cell_gain[c.id] <= 0.0) continue;
      if (std::find(seq.begin(), seq.end(), c.id) != seq.end()) continue;
      // A single-cell sequence (start == finish) grows into an out-and-back
      // visit; otherwise the cell is tried at every interior position.
      std::vector<std::vector<int>> trials;
      if (seq.size() == 1) {
        trials.push_back({seq[0], c.id, seq[0]});
      } else {
        for (std::size_t pos = 1; pos < seq.size(); ++pos) {
          std::vector<int> trial = seq;
          trial.insert(trial.begin() + pos, c.id);
          trials.push_back(std::move(trial));
        }
      }
      for (auto& trial : trials) {
        if (trial.size() - 1 > max_hops) continue;
        const double t = seq_travel(trial);
        if (t > travel_cap) continue;
        if (!splittable(trial, 0, trial.size() - 1, iter)) continue;
        const double detour = t - travel;
        const double ratio =
            detour > 1e-12 ? cell_gain[c.id] / detour
                           : std::numeric_limits<double>::infinity();
        std::size_t pos = 0;
        for (std::size_t i = 0; i < trial.size(); ++i) {
          if (i >= seq.size() || trial[i] != seq[i]) {
            pos = i;
            break;
          }
        }
        if (!best || ratio > best_ratio) {
          best_ratio = ratio;
          best = {c.id, pos};
        }
      }
    }
    if (!best) break;
    if (seq.size() == 1) {
      seq = {seq[0], best->first, seq[0]};
    } else {
      seq.insert(seq.begin() + best->second, best->first);
    }
    travel = seq_travel(seq);
  }

  // 2-opt over the cell sequence, keeping it representable.
  if (seq.size() >= 4) {
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::size_t i = 1; i + 1 < seq.size() && !improved; ++i) {
        for (std::size_t j = i + 1; j + 1 < seq.size() && !improved; ++j) {
          std::vector<int> trial = seq;
          std::reverse(trial.begin() + i, trial.begin() + j + 1);
          const double t = seq_travel(trial);
          if (t < travel - 1e-12 &&
              splittable(trial, 0, trial.size() - 1, iter)) {
            seq = std::move(trial);
            travel = t;
            improved = true;
          }
        }
      }
    }
  }

  std::vector<LocationId> candidates;
  for (int cell : seq) {
    const auto& m = grid_.cell(cell).members;
    candidates.insert(candidates.end(), m.begin(), m.end());
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  const IdSet picked = greedy_pick(candidates, b_e);

  CellSearchResult res;
  res.path.cells = seq;
  res.path.selections.assign(seq.size(), IdSet{});
  double spent = 0.0;
  for (LocationId v : picked) {
    const int cell = grid_.cell_of(v);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (seq[i] == cell) {
        res.path.selections[i] = res.path.selections[i].with(v);
        break;
      }
    }
    spent += dom_.sensing_cost(v);
  }
  res.path.spent_experimental = spent;
  res.path.spent_travel = travel;
  res.reward = oracle_->push_set(picked);
  oracle_->pop(picked.size());
  return res;
}

void EsipSearch::explore_child(int cs, int ct, double b_e, int iter, int cm,
                               double b1, double& lb,
                               CellSearchResult& incumbent, bool bnb) {
  struct Side {
    int from, to;
    double budget;
  };
  const Side left{cs, cm, b1};
  const Side right{cm, ct, b_e - b1};
  const bool swapped = bnb && opts_.bnb.explore_larger_budget_first &&
                       left.budget < right.budget;
  const Side first = swapped ? right : left;
  const Side second = swapped ? left : right;

  // A heuristic lower bound is only worth computing where the child still
  // has a subtree to prune; a depth-0 child is itself a single greedy pass.
  const bool seed_lbs = bnb && iter - 1 >= 1;

  double lb_first = 0.0;
  if (bnb) {
    const double ub_second =
        calculate_ub(second.from, second.to, second.budget, iter - 1);
    double heur_value = 0.0;
    if (seed_lbs) {
      const auto heur = heuristic_op(first.from, first.to, first.budget,
                                     iter - 1);
      if (heur) heur_value = heur->reward;
    }
    lb_first = alt_lb(heur_value, lb, ub_second);
  }
  auto res_first =
      recursive(first.from, first.to, first.budget, iter - 1, lb_first);
  if (!res_first) return;

  const IdSet first_sel = res_first->path.all_selected();
  oracle_->push_set(first_sel);

  double lb_second = 0.0;
  if (bnb) {
    double heur_value = 0.0;
    if (seed_lbs) {
      const auto heur = heuristic_op(second.from, second.to, second.budget,
                                     iter - 1);
      if (heur) heur_value = heur->reward;
    }
    lb_second = alt_lb(heur_value, lb, res_first->reward);
  }
  auto res_second =
      recursive(second.from, second.to, second.budget, iter - 1, lb_second);
  oracle_->pop(first_sel.size());
  if (!res_second) return;

  CellSearchResult cand;
  cand.path = swapped ? concat_cell_paths(res_second->path, res_first->path,
                                          grid_)
                      : concat_cell_paths(res_first->path, res_second->path,
                                          grid_);
  // Canonical value: one sorted-order evaluation, identical across search
  // configurations that reach the same selection set.
  const IdSet all = cand.path.all_selected();
  cand.reward = oracle_->push_set(all);
  oracle_->pop(all.size());

  if (better(cand, incumbent)) {
    incumbent = std::move(cand);
    lb = std::max(lb, incumbent.reward);
  }
}

std::optional<CellSearchResult> EsipSearch::recursive(
    int cs, int ct, double b_e, int iter, double reward_lb,
    const CellSearchResult* seed) {
  if (grid_.distance(cs, ct) > radius(iter)) return std::nullopt;

  CellSearchResult incumbent = base_selection(cs, ct, b_e);
  if (seed && better(*seed, incumbent)) incumbent = *seed;
  double lb = std::max(reward_lb, incumbent.reward);

  if (iter == 0 || expired()) return incumbent;

  std::vector<int> filter;
  const double child_reach = radius(iter) / 2.0;
  for (const Cell& c : grid_.cells()) {
    if (grid_.distance(cs, c.id) <= child_reach &&
        grid_.distance(c.id, ct) <= child_reach)
      filter.push_back(c.id);
  }
  const std::vector<double> splits =
      budget_splits(b_e, opts_.schedule, quantum_);

  if (opts_.bnb.enabled) {
    std::vector<ChildRef> children;
    children.reserve(filter.size() * splits.size());
    for (int cm : filter) {
      for (double b1 : splits) {
        const double ub = calculate_ub(cs, cm, b1, iter - 1) +
                          calculate_ub(cm, ct, b_e - b1, iter - 1);
        children.push_back({cm, b1, ub});
      }
    }
    children = order_children(std::move(children), opts_.bnb.top_k);
    for (const ChildRef& child : children) {
      if (expired()) break;
      if (prune_decision(child.upper, lb, opts_.bnb.alpha)) {
        trace(iter, child.upper, lb, true);
        continue;
      }
      trace(iter, child.upper, lb, false);
      explore_child(cs, ct, b_e, iter, child.cell, child.split, lb, incumbent,
                    true);
    }
  } else {
    for (int cm : filter) {
      for (double b1 : splits) {
        if (expired()) break;
        explore_child(cs, ct, b_e, iter, cm, b1, lb, incumbent, false);
      }
      if (expired()) break;
    }
  }
  return incumbent;
}

std::optional<PlanResult> EsipSearch::plan(const PlanQuery& query,
                                           const IdSet& committed) {
  const int cs = grid_.cell_of(query.start);
  const int ct = grid_.cell_of(query.finish);
  IdSet run_committed = committed.with(query.start).with(query.finish);
  begin(run_committed);

  const double cell_l = grid_.cell_width_cost();
  const double inflated =
      opts_.inflate_budget ? sd_budget(query.budget, cell_l) : query.budget;

  struct Candidate {
    int iter;
    double travel_budget;
  };
  std::vector<Candidate> schedule;
  if (cs == ct) schedule.push_back({0, 0.0});
  for (int k = 0; std::ldexp(cell_l, k) <= inflated; ++k)
    schedule.push_back({k, std::ldexp(cell_l, k)});

  std::optional<CellSearchResult> best;
  std::optional<PlanResult> best_plan;
  std::vector<IterDiagnostic> diags;

  for (const Candidate& cand : schedule) {
    IterDiagnostic diag;
    diag.iter = cand.iter;
    diag.travel_budget = cand.travel_budget;
    const double be_raw = inflated - cand.travel_budget;
    const double b_e =
        std::max(0.0, std::floor(be_raw / quantum_ + 1e-9) * quantum_);
    diag.experimental_budget = b_e;

    std::optional<CellSearchResult> seed;
    double root_lb = 0.0;
    if (opts_.bnb.enabled && opts_.bnb.seed_with_heuristic) {
      seed = heuristic_op(cs, ct, b_e, cand.iter);
      if (seed) root_lb = seed->reward;
    }
    auto res = recursive(cs, ct, b_e, cand.iter, root_lb,
                         seed ? &*seed : nullptr);
    diag.feasible = res.has_value();
    if (res) {
      res->path.start_location = query.start;
      res->path.finish_location = query.finish;
      const Path expanded = expand_to_tour(res->path, grid_, dom_);
      const Path smoothed = two_opt_smooth(expanded, dom_);
      diag.search_reward = res->reward;
      diag.expanded_cost = path_cost(smoothed, dom_);
      diag.cells_visited = res->path.cells.size();
      if (!best || better(*res, *best)) {
        best = res;
        PlanResult plan;
        plan.path = smoothed;
        plan.cost = diag.expanded_cost;
        plan.search_reward = res->reward;
        plan.cell_path = res->path;
        best_plan = std::move(plan);
        trace(-1, res->reward, res->reward, false);
      }
    }
    diags.push_back(diag);
  }

  if (!best_plan) return std::nullopt;
  best_plan->iterations = std::move(diags);

  const auto residual_fn = residual(fn_, committed);
  const IdSet visited = best_plan->path.visited();
  best_plan->reward =
      residual_fn->evaluable(visited) ? residual_fn->eval(visited)
                                      : best_plan->search_reward;
  return best_plan;
}

std::optional<PlanResult> esip_plan(const SensingDomain& dom,
                                    const CellGrid& grid,
                                    std::shared_ptr<const RewardFunction> fn,
                                    const PlanQuery& query,
                                    const IdSet& committed,
                                    const EsipOptions& opts) {
  EsipSearch search(dom, grid, std::move(fn), opts);
  return search.plan(query, committed);
}

std::optional<Path> uniform_density_baseline(
    const SensingDomain& dom, const CellGrid& grid,
    std::shared_ptr<const RewardFunction> fn, const PlanQuery& query,
    const IdSet& committed) {
  if (dom.travel_cost(query.start, query.finish) > query.budget)
    return std::nullopt;

  const auto oracle =
      make_gain_oracle(fn, committed.with(query.start).with(query.finish));

  const Location& s = dom.location(query.start);
  const Location& t = dom.location(query.finish);
  const double dx = t.x - s.x;
  const double dy = t.y - s.y;
  const double len2 = dx * dx + dy * dy;

  struct CorridorCell {
    double along = 0.0;
    double off = 0.0;
    int id = 0;
  };
  std::vector<CorridorCell> corridor;
  for (const Cell& c : grid.cells()) {
    CorridorCell cc;
    cc.id = c.id;
    if (len2 > 0.0) {
      const double t_par =
          std::clamp(((c.cx - s.x) * dx + (c.cy - s.y) * dy) / len2, 0.0, 1.0);
      cc.along = t_par;
      cc.off = std::hypot(c.cx - (s.x + t_par * dx), c.cy - (s.y + t_par * dy));
    } else {
      cc.along = 0.0;
      cc.off = std::hypot(c.cx - s.x, c.cy - s.y);
    }
    if (cc.off <= grid.cell_width()) corridor.push_back(cc);
  }
  std::sort(corridor.begin(), corridor.end(),
            [](const CorridorCell& a, const CorridorCell& b) {
              if (a.along != b.along) return a.along < b.along;
              if (a.off != b.off) return a.off < b.off;
              return a.id < b.id;
            });

  std::vector<LocationId> selections;
  auto assemble = [&](const std::vector<LocationId>& sel) {
    std::vector<LocationId> nodes;
    nodes.push_back(query.start);
    for (LocationId id : sel)
      if (nodes.back() != id) nodes.push_back(id);
    if (nodes.size() < 2 || nodes.back() != query.finish)
      nodes.push_back(query.finish);
    return two_opt_smooth(Path(std::move(nodes)), dom);
  };

  Path best = assemble(selections);
  for (const CorridorCell& cc : corridor) {
    std::vector<LocationId> added;
    for (int round = 0; round < 2; ++round) {
      std::optional<LocationId> pick;
      double pick_gain = 0.0;
      for (LocationId v : grid.cell(cc.id).members) {
        if (!oracle->evaluable(v)) continue;
        const double g = oracle->gain(v);
        if (g <= 0.0) continue;
        if (!pick || g > pick_gain) {
          pick = v;
          pick_gain = g;
        }
      }
      if (!pick) break;
      oracle->push(*pick);
      added.push_back(*pick);
    }
    if (added.empty()) continue;
    std::vector<LocationId> trial = selections;
    trial.insert(trial.end(), added.begin(), added.end());
    Path candidate = assemble(trial);
    if (path_cost(candidate, dom) <= query.budget) {
      selections = std::move(trial);
      best = std::move(candidate);
    } else {
      oracle->pop(added.size());
      break;
    }
  }
  return best;
}

}  // namespace ipp
