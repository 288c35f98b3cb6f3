#ifndef IPP_MULTI_HPP
#define IPP_MULTI_HPP

#include <functional>
#include <optional>

#include "ipp/esip.hpp"

namespace ipp {

struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(std::string what,
                           std::optional<int> robot = std::nullopt)
      : std::runtime_error(std::move(what)), robot_index(robot) {}
  std::optional<int> robot_index;
};

struct MultiRobotQuery {
  std::vector<PlanQuery> robots;  // one query per robot, planned in order
};

// Any single-robot strategy: plan for `query` treating `committed` as already
// observed. Returns nullopt when infeasible.
using SingleRobotPlanner = std::function<std::optional<PlanResult>(
    const PlanQuery& query, const IdSet& committed)>;

struct RobotStage {
  PlanResult result;
  IdSet committed_before;
  double stage_gain = 0.0;  // f(A_{i-1} + visited_i) - f(A_{i-1})
};

struct MultiRobotPlan {
  std::vector<RobotStage> stages;
  IdSet visited;              // union of all paths
  double joint_reward = 0.0;  // f(visited)
};

// Plans robots one at a time, committing each path before the next robot so
// later robots optimize the residual reward. Throws InfeasibleError with the
// failing robot's index.
MultiRobotPlan sequential_allocation(const SensingDomain& dom,
                                     const RewardFunction& fn,
                                     const MultiRobotQuery& query,
                                     const SingleRobotPlanner& planner);

// Greedy start selection: each robot in turn takes the candidate start whose
// plan adds the most residual reward. Ties keep the earlier candidate.
std::vector<LocationId> select_starts_greedy(
    const RewardFunction& fn, const std::vector<LocationId>& candidates,
    int k,
    const std::function<std::optional<PlanResult>(LocationId start,
                                                  const IdSet& committed)>&
        planner);

// Approximation factor of sequential allocation given an eta-approximate
// single-robot planner: 1/(1 - exp(-1/eta)) when all robots share endpoints,
// 1 + eta otherwise.
double theorem1_factor(double eta, bool same_endpoints);

}  // namespace ipp

#endif
