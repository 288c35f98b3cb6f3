#include "ipp/bnb.hpp"

#include <algorithm>

#include "json.hpp"

namespace ipp {

double alt_lb(double heuristic_lb, double reward_lb, double other_bound) {
  return std::max(heuristic_lb, reward_lb - other_bound);
}

bool prune_decision(double child_ub, double reward_lb, double alpha) {
  return !(child_ub > alpha * reward_lb);
}

std::vector<ChildRef> order_children(std::vector<ChildRef> children,
                                     std::size_t top_k) {
  std::sort(children.begin(), children.end(),
            [](const ChildRef& a, const ChildRef& b) {
              if (a.upper != b.upper) return a.upper > b.upper;
              if (a.cell != b.cell) return a.cell < b.cell;
              return a.split < b.split;
            });
  if (top_k > 0 && children.size() > top_k) children.resize(top_k);
  return children;
}

std::size_t SearchTrace::pruned_count() const {
  std::size_t n = 0;
  for (const TraceRecord& r : records_)
    if (r.pruned) ++n;
  return n;
}

void SearchTrace::write_jsonl(std::ostream& os) const {
  for (const TraceRecord& r : records_) {
    nlohmann::ordered_json j;
    j["depth"] = r.depth;
    j["ub"] = r.upper;
    j["lb"] = r.lower;
    j["pruned"] = r.pruned;
    j["t"] = r.elapsed_seconds;
    os << j.dump() << "\n";
  }
}

}  // namespace ipp
