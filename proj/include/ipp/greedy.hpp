#ifndef IPP_GREEDY_HPP
#define IPP_GREEDY_HPP

#include <memory>
#include <optional>

#include "ipp/domain.hpp"
#include "ipp/reward.hpp"

namespace ipp {

// Budget for sensing only (experimental cost units).
struct SelectionBudget {
  double value = 0.0;
};

// Budgeted greedy selection by maximal marginal gain. Adds the candidate with
// the largest gain whose sensing cost still fits; stops when nothing fits or
// all gains are non-positive. Ties break toward the smallest id.
IdSet greedy_subset(const RewardFunction& fn, const IdSet& candidates,
                    SelectionBudget budget, const SensingDomain& dom);

// Greedy path baselines. Both grow an s-t path by cheapest insertion; a
// candidate is admissible only while the extended path still fits the budget
// (the return leg to the finish is part of the path, so it is always
// reserved). Returns nullopt when even the direct path is infeasible.
std::optional<Path> greedy_benefit_cost(const SensingDomain& dom,
                                        const RewardFunction& fn,
                                        const PlanQuery& query);
std::optional<Path> greedy_reward(const SensingDomain& dom,
                                  const RewardFunction& fn,
                                  const PlanQuery& query);

struct BruteForceOptions {
  // Exhaustive enumeration is exponential; the guard keeps accidental use in
  // check. Tests on structured instances may raise it.
  std::size_t max_locations = 12;
};

// Exact single-robot optimum by exhaustive enumeration over simple interior
// sequences with budget pruning.
std::optional<Path> brute_force_path(const SensingDomain& dom,
                                     const RewardFunction& fn,
                                     const PlanQuery& query,
                                     const BruteForceOptions& opts = {});

// Adversarial construction where benefit-cost and raw-reward greedy both
// collapse while the optimum collects a cluster hidden behind a costly
// approach: a reward-1 finish location, a ring of reward-1 locations entered
// through a low-reward gate at distance B/2, and a line of small rewards next
// to the start. Total budget is 2B with start == finish.
struct Fig3Instance {
  double b = 0.0;
  double eps = 0.0;
  LocationId start = 0;     // also the finish
  LocationId far_node = 0;  // reward 1, at distance B
  LocationId gate = 0;      // ring entry, reward eps
  IdSet ring;               // gate + (B/eps - 1) locations of reward 1
  IdSet series;             // B/eps locations of reward 2*eps
  std::shared_ptr<SensingDomain> domain;
  std::shared_ptr<ModularReward> reward;
  PlanQuery query;
};

Fig3Instance make_fig3_instance(double b, double eps);

}  // namespace ipp

#endif
