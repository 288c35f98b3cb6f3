#ifndef IPP_BNB_HPP
#define IPP_BNB_HPP

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

namespace ipp {

// Branch-and-bound knobs for the cell search. alpha scales the lower bound
// used in pruning decisions (alpha = 1 keeps pruning lossless); top_k limits
// how many ordered children each node explores (0 = unbounded).
struct BnBConfig {
  bool enabled = true;
  double alpha = 1.0;
  std::size_t top_k = 0;
  std::optional<double> time_limit_seconds;
  bool seed_with_heuristic = true;
  // Explore the subpath with the larger experimental budget first so the
  // sibling bound used in altLB is the tighter one.
  bool explore_larger_budget_first = true;
};

enum class BoundSource { heuristic, alt_lb, incumbent };

struct BoundRecord {
  double upper = 0.0;
  double lower = 0.0;
  BoundSource source = BoundSource::heuristic;
};

// Lower bound for a subproblem: the better of its heuristic solution and
// what the grandparent incumbent demands once the sibling's bound is taken
// out.
double alt_lb(double heuristic_lb, double reward_lb, double other_bound);

// Explore iff the child's upper bound beats alpha times the incumbent.
bool prune_decision(double child_ub, double reward_lb, double alpha);

struct ChildRef {
  int cell = 0;
  double split = 0.0;
  double upper = 0.0;
};

// Sort children by decreasing upper bound (ties by cell id then split) and
// keep the first top_k (0 = all).
std::vector<ChildRef> order_children(std::vector<ChildRef> children,
                                     std::size_t top_k);

struct TraceRecord {
  int depth = 0;
  double upper = 0.0;
  double lower = 0.0;
  bool pruned = false;
  double elapsed_seconds = 0.0;
};

// Line-delimited record sink for search diagnostics; root-depth records
// double as the incumbent trace.
class SearchTrace {
 public:
  void emit(const TraceRecord& rec) { records_.push_back(rec); }
  const std::vector<TraceRecord>& records() const { return records_; }
  std::size_t pruned_count() const;
  void write_jsonl(std::ostream& os) const;

 private:
  std::vector<TraceRecord> records_;
};

}  // namespace ipp

#endif
