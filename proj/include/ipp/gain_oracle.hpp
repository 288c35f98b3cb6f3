#ifndef IPP_GAIN_ORACLE_HPP
#define IPP_GAIN_ORACLE_HPP

#include <memory>

#include "ipp/domain.hpp"
#include "ipp/reward.hpp"

namespace ipp {

// Stack-shaped marginal-gain evaluator over a committed set. The planners
// push selections while descending the search tree and pop on the way back;
// state after a pop is exactly the state before the matching push.
class GainOracle {
 public:
  virtual ~GainOracle() = default;
  virtual bool evaluable(LocationId v) const = 0;
  virtual double gain(LocationId v) const = 0;
  virtual void push(LocationId v) = 0;
  virtual void pop(std::size_t count) = 0;
  virtual std::size_t depth() const = 0;
  virtual IdSet active() const = 0;  // committed + pushed

  double push_set(const IdSet& set) {
    double total = 0.0;
    for (LocationId id : set) {
      total += gain(id);
      push(id);
    }
    return total;
  }
};

// Picks the incremental MI session for MutualInformationReward, a generic
// eval-difference oracle otherwise.
std::unique_ptr<GainOracle> make_gain_oracle(
    std::shared_ptr<const RewardFunction> fn, const IdSet& committed);

}  // namespace ipp

#endif
