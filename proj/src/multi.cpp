#include "ipp/multi.hpp"

#include <cassert>
#include <cmath>
#include <limits>

namespace ipp {

MultiRobotPlan sequential_allocation(const SensingDomain& dom,
                                     const RewardFunction& fn,
                                     const MultiRobotQuery& query,
                                     const SingleRobotPlanner& planner) {
  if (query.robots.empty())
    throw ContractError("sequential_allocation: no robots");

  MultiRobotPlan plan;
  IdSet committed;
  double committed_value = 0.0;
  for (std::size_t i = 0; i < query.robots.size(); ++i) {
    const PlanQuery& q = query.robots[i];
    if (dom.travel_cost(q.start, q.finish) > q.budget)
      throw InfeasibleError("robot " + std::to_string(i) +
                                ": direct path exceeds budget",
                            static_cast<int>(i));
    auto result = planner(q, committed);
    if (!result)
      throw InfeasibleError("robot " + std::to_string(i) + ": planner found "
                            "no feasible path",
                            static_cast<int>(i));

    RobotStage stage;
    stage.committed_before = committed;
    stage.result = std::move(*result);

    const IdSet after = committed.united(stage.result.path.visited());
    const double after_value = fn.evaluable(after) ? fn.eval(after)
                                                   : committed_value;
    stage.stage_gain = after_value - committed_value;
    committed = after;
    committed_value = after_value;
    plan.stages.push_back(std::move(stage));
  }
  plan.visited = committed;
  plan.joint_reward = committed_value;
  return plan;
}

std::vector<LocationId> select_starts_greedy(
    const RewardFunction& fn, const std::vector<LocationId>& candidates,
    int k,
    const std::function<std::optional<PlanResult>(LocationId start,
                                                  const IdSet& committed)>&
        planner) {
  if (k < 1) throw ContractError("select_starts_greedy: k must be positive");
  if (candidates.size() < static_cast<std::size_t>(k))
    throw ContractError("select_starts_greedy: not enough candidate starts");

  std::vector<LocationId> chosen;
  std::vector<bool> used(candidates.size(), false);
  IdSet committed;
  double committed_value = 0.0;

  for (int robot = 0; robot < k; ++robot) {
    std::optional<std::size_t> best;
    double best_gain = -std::numeric_limits<double>::infinity();
    IdSet best_after;
    double best_after_value = 0.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      auto result = planner(candidates[c], committed);
      if (!result) continue;
      const IdSet after = committed.united(result->path.visited());
      const double after_value = fn.evaluable(after) ? fn.eval(after)
                                                     : committed_value;
      const double gain = after_value - committed_value;
      if (!best || gain > best_gain) {
        best = c;
        best_gain = gain;
        best_after = after;
        best_after_value = after_value;
      }
    }
    if (!best)
      throw InfeasibleError("select_starts_greedy: no feasible candidate for "
                            "robot " +
                            std::to_string(robot));
    used[*best] = true;
    chosen.push_back(candidates[*best]);
    committed = best_after;
    committed_value = best_after_value;
  }
  return chosen;
}

double theorem1_factor(double eta, bool same_endpoints) {
  if (!(eta >= 1.0)) throw ContractError("theorem1_factor: eta must be >= 1");
  const double shared = 1.0 / (1.0 - std::exp(-1.0 / eta));
  assert(shared <= 1.0 + eta + 1e-12);
  return same_endpoints ? shared : 1.0 + eta;
}

}  // namespace ipp
