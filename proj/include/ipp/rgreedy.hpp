#ifndef IPP_RGREEDY_HPP
#define IPP_RGREEDY_HPP

#include <optional>

#include "ipp/domain.hpp"
#include "ipp/reward.hpp"

namespace ipp {

struct RecursiveGreedyOptions {
  // Quasi-polynomial runtime; the guard keeps accidental large runs in check.
  std::size_t max_locations = 32;
  // Cost quantization resolution. Defaults to a gcd-like quantum of the
  // instance costs, floored at 1/100 of the smallest nonzero pairwise cost.
  std::optional<double> resolution;
  bool memoize = true;
};

// Divide-and-conquer greedy search over raw locations: tries every middle
// node and every quantized budget split, planning the first subpath and then
// the second against the residual of the first. Depth `iter` bounds the
// result to at most 2^iter + 1 nodes. Returns nullopt when the direct
// start-finish hop already exceeds the budget.
std::optional<Path> recursive_greedy(const SensingDomain& dom,
                                     const RewardFunction& fn,
                                     const PlanQuery& query, int iter,
                                     const IdSet& committed = {},
                                     const RecursiveGreedyOptions& opts = {});

// Shared cost-quantization rule: an approximate gcd of the given costs,
// floored at min_positive/100.
double cost_quantum(const std::vector<double>& costs);

}  // namespace ipp

#endif
