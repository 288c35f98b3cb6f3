#ifndef IPP_ESIP_HPP
#define IPP_ESIP_HPP

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>

#include "ipp/bnb.hpp"
#include "ipp/gain_oracle.hpp"
#include "ipp/grid.hpp"

namespace ipp {

enum class SplitKind { linear, exp_two_sided, exp_one_sided };

struct SplitSchedule {
  SplitKind kind = SplitKind::exp_two_sided;
};

// Experimental-budget split points in [0, b_e]; always contains 0 and b_e.
// linear: every multiple of the quantum; exp_two_sided: powers of two of the
// quantum from both ends; exp_one_sided: powers from zero only, plus b_e.
std::vector<double> budget_splits(double b_e, const SplitSchedule& schedule,
                                  double quantum);

// Gcd-like quantum of the domain's positive sensing costs (1.0 when there are
// none).
double sensing_cost_quantum(const SensingDomain& dom);

struct EsipOptions {
  SplitSchedule schedule{};
  BnBConfig bnb{};
  std::optional<double> cost_quantum;
  // Inflate the query budget to sd_budget(B, L) so the decomposed search can
  // represent the original optimum. The output path is allowed to cost up to
  // planned_cost_bound(B, L, ...).
  bool inflate_budget = true;
  // Threads for candidate gain evaluation inside greedy selection. The argmax
  // is reduced sequentially, so results match the single-threaded run.
  int threads = 1;
  SearchTrace* trace = nullptr;
};

struct IterDiagnostic {
  int iter = 0;
  double travel_budget = 0.0;
  double experimental_budget = 0.0;
  bool feasible = false;
  double search_reward = 0.0;
  double expanded_cost = 0.0;
  std::size_t cells_visited = 0;
};

struct PlanResult {
  Path path;
  double cost = 0.0;
  // Reward of the visited set relative to the committed set given to the
  // planner (endpoints included in the visited set).
  double reward = 0.0;
  // Residual reward beyond committed + endpoints, as scored by the search.
  double search_reward = 0.0;
  CellPath cell_path;
  std::vector<IterDiagnostic> iterations;
};

struct CellSearchResult {
  CellPath path;
  double reward = 0.0;  // relative to the oracle state at the call
};

// Budgeted informative path search over a cell decomposition: an outer loop
// over power-of-two traveling budgets around a recursive middle-cell search
// with greedy in-cell selection, optionally pruned by branch and bound.
class EsipSearch {
 public:
  EsipSearch(const SensingDomain& dom, const CellGrid& grid,
             std::shared_ptr<const RewardFunction> fn, EsipOptions opts = {});

  // Full single-robot plan; prior selections in `committed` are treated as
  // already observed. Returns nullopt when no traveling budget reaches the
  // finish cell.
  std::optional<PlanResult> plan(const PlanQuery& query,
                                 const IdSet& committed = {});

  // Subproblem surface (exposed for tests). begin() fixes the committed set;
  // the recursion works against the oracle's current stack state.
  void begin(const IdSet& committed);
  std::optional<CellSearchResult> recursive(int cs, int ct, double b_e,
                                            int iter, double reward_lb = 0.0,
                                            const CellSearchResult* seed =
                                                nullptr);
  double calculate_ub(int cs, int ct, double b_e, int iter);
  std::optional<CellSearchResult> heuristic_op(int cs, int ct, double b_e,
                                               int iter);

  GainOracle& oracle() { return *oracle_; }
  double quantum() const { return quantum_; }
  double cell_width() const { return grid_.cell_width_cost(); }

 private:
  struct UbKey {
    int cs = 0;
    int ct = 0;
    double b_e = 0.0;
    int iter = 0;
    IdSet active;
    bool operator==(const UbKey&) const = default;
  };
  struct UbKeyHash {
    std::size_t operator()(const UbKey& k) const;
  };
  // Under a uniform sensing cost greedy selections are prefix-stable in the
  // budget, so one full pass per (cells, iter, committed) serves all splits.
  struct UbPrefix {
    double unit_cost = 0.0;
    std::vector<double> cumulative;  // cumulative greedy gains
  };

  double radius(int iter) const;
  bool expired() const;
  double elapsed_seconds() const;
  void trace(int depth, double ub, double lb, bool pruned) const;
  bool better(const CellSearchResult& a, const CellSearchResult& b) const;
  CellSearchResult base_selection(int cs, int ct, double b_e);
  IdSet greedy_pick(const std::vector<LocationId>& candidates, double b_e);
  bool splittable(const std::vector<int>& seq, std::size_t lo, std::size_t hi,
                  int iter) const;
  void explore_child(int cs, int ct, double b_e, int iter, int cm, double b1,
                     double& lb, CellSearchResult& incumbent, bool bnb);

  const SensingDomain& dom_;
  const CellGrid& grid_;
  std::shared_ptr<const RewardFunction> fn_;
  EsipOptions opts_;
  double quantum_;
  std::unique_ptr<GainOracle> oracle_;
  std::chrono::steady_clock::time_point start_time_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  std::unordered_map<UbKey, double, UbKeyHash> ub_memo_;
  std::unordered_map<UbKey, UbPrefix, UbKeyHash> ub_prefix_memo_;
  std::optional<double> uniform_sensing_cost_;
};

std::optional<PlanResult> esip_plan(const SensingDomain& dom,
                                    const CellGrid& grid,
                                    std::shared_ptr<const RewardFunction> fn,
                                    const PlanQuery& query,
                                    const IdSet& committed = {},
                                    const EsipOptions& opts = {});

// Uniform-sample-spacing baseline: walk the cells nearest the direct
// start-finish corridor in order, greedily taking two locations in each
// while the smoothed connecting path still fits the budget.
std::optional<Path> uniform_density_baseline(
    const SensingDomain& dom, const CellGrid& grid,
    std::shared_ptr<const RewardFunction> fn, const PlanQuery& query,
    const IdSet& committed = {});

}  // namespace ipp

#endif
