#ifndef IPP_REWARD_HPP
#define IPP_REWARD_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ipp/domain.hpp"
#include "ipp/linalg.hpp"

namespace ipp {

struct SEKernelParams {
  double signal_variance = 1.0;   // sigma_f^2
  double lengthscale = 1.0;       // meters
  double noise_variance = 0.01;   // sigma_n^2
};

// Gaussian-Process prior over a fixed set of locations: a covariance matrix
// with measurement noise on the diagonal, either derived from an isotropic
// squared-exponential kernel or given explicitly. Immutable and shareable.
class GPModel {
 public:
  static GPModel from_kernel(const std::vector<LocationId>& ids,
                             const std::vector<double>& xs,
                             const std::vector<double>& ys,
                             const SEKernelParams& params);
  static GPModel from_covariance(std::vector<LocationId> ids, Matrix sigma,
                                 double noise_variance = 0.0);

  std::size_t size() const { return ids_.size(); }
  const std::vector<LocationId>& ids() const { return ids_; }
  std::size_t index_of(LocationId id) const;
  bool has(LocationId id) const { return index_.count(id) != 0; }
  IdSet all_ids() const { return IdSet(ids_); }

  const Matrix& cov() const { return cov_; }  // noise included on the diagonal
  double jitter() const { return jitter_; }
  const std::optional<SEKernelParams>& params() const { return params_; }

  // Covariance block over model indices, jitter added on the diagonal.
  Matrix block(const std::vector<std::size_t>& idx) const;
  std::vector<std::size_t> indices_of(const IdSet& set) const;

 private:
  GPModel() = default;
  std::vector<LocationId> ids_;
  std::unordered_map<LocationId, std::size_t> index_;
  Matrix cov_;
  double jitter_ = 0.0;
  std::optional<SEKernelParams> params_;
};

// Normalized set function: eval({}) == 0. Implementations must be pure; the
// planner may evaluate them concurrently.
class RewardFunction {
 public:
  virtual ~RewardFunction() = default;
  virtual double eval(const IdSet& set) const = 0;
  // f(set + v) - f(set); default goes through eval.
  virtual double gain(const IdSet& set, LocationId v) const;
  // False when eval(set) is undefined (MI needs a strict subset of V).
  virtual bool evaluable(const IdSet& set) const;
};

// Contract-checked marginal gain: throws ContractError when v is already in
// the set.
double marginal_gain(const RewardFunction& fn, const IdSet& set, LocationId v);

// f_R(A) = f(A u R) - f(R). Wrapping a residual flattens the committed sets
// so nested residuals telescope exactly.
std::shared_ptr<const RewardFunction> residual(
    std::shared_ptr<const RewardFunction> fn, const IdSet& committed);

class ModularReward : public RewardFunction {
 public:
  explicit ModularReward(std::map<LocationId, double> table)
      : table_(std::move(table)) {}
  double eval(const IdSet& set) const override;
  double gain(const IdSet& set, LocationId v) const override;
  double reward_of(LocationId v) const;

 private:
  std::map<LocationId, double> table_;
};

// Mutual information between a set of observed locations and the rest of the
// model: MI(A) = H(X_{V\A}) - H(X_{V\A} | X_A), evaluated in nats via
// log-determinants. Requires |A| <= |V| - 1.
class MutualInformationReward : public RewardFunction {
 public:
  explicit MutualInformationReward(std::shared_ptr<const GPModel> model,
                                   bool cache_enabled = true);
  double eval(const IdSet& set) const override;
  bool evaluable(const IdSet& set) const override;
  const GPModel& model() const { return *model_; }
  std::shared_ptr<const GPModel> model_ptr() const { return model_; }

 private:
  double log_det(const IdSet& set) const;
  std::shared_ptr<const GPModel> model_;
  bool cache_enabled_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<IdSet, double, IdSetHash> log_det_cache_;
};

class ResidualReward : public RewardFunction {
 public:
  ResidualReward(std::shared_ptr<const RewardFunction> base, IdSet committed);
  double eval(const IdSet& set) const override;
  double gain(const IdSet& set, LocationId v) const override;
  bool evaluable(const IdSet& set) const override;
  const IdSet& committed() const { return committed_; }
  const std::shared_ptr<const RewardFunction>& base() const { return base_; }

 private:
  std::shared_ptr<const RewardFunction> base_;
  IdSet committed_;
  double base_value_;
};

// Incremental MI marginal-gain evaluator used inside the planners, where the
// committed set grows and shrinks in stack order. Gains use the
// conditional-variance ratio form
//   gain(A, v) = 1/2 log( var(v | A) / var(v | V \ A \ v) )
// computed from one factorization of Sigma_committed and one inverse of its
// complement; push/pop never mutate those, so a pop restores the previous
// state exactly.
class MiGainSession {
 public:
  MiGainSession(std::shared_ptr<const GPModel> model, const IdSet& committed);
  ~MiGainSession();
  MiGainSession(MiGainSession&&) noexcept;
  MiGainSession& operator=(MiGainSession&&) noexcept;

  bool evaluable(LocationId v) const;
  double gain(LocationId v) const;
  void push(LocationId v);
  // Pushes the ids in ascending order, returning the summed gains.
  double push_set(const IdSet& set);
  void pop(std::size_t count = 1);
  std::size_t depth() const { return pushed_.size(); }
  const IdSet& committed() const { return committed_; }
  IdSet active() const;  // committed + pushed

 private:
  struct CholAppend;  // growable lower-triangular factor
  double conditional_variance_given_active(LocationId v) const;
  double complement_precision(LocationId v) const;

  std::shared_ptr<const GPModel> model_;
  IdSet committed_;
  std::vector<std::size_t> base_idx_;   // model indices of committed, sorted
  std::vector<std::size_t> comp_idx_;   // model indices of complement, sorted
  std::vector<std::size_t> comp_pos_;   // model index -> position in comp_idx_
  Matrix comp_inverse_;                 // inverse of Sigma_complement
  std::vector<LocationId> pushed_;      // stack order
  std::vector<std::size_t> pushed_idx_;

  std::unique_ptr<CholAppend> chol_active_;  // factor of Sigma_{committed+pushed}
  std::unique_ptr<CholAppend> chol_mss_;     // factor of comp_inverse_[S,S]
};

// MI(A) for a model, per the Gaussian entropy-difference definition.
double mi_evaluate(const GPModel& model, const IdSet& set);

struct Posterior {
  double mean = 0.0;
  double variance = 0.0;
};

// Conditional mean/variance at every unobserved location given noisy
// observations (zero prior mean).
std::map<LocationId, Posterior> gp_posterior(
    const GPModel& model, const std::map<LocationId, double>& observed);

struct FitSample {
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

// Grid search maximizing the Gaussian log marginal likelihood; ties keep the
// earlier grid point. Constant data short-circuits to the smallest
// signal-variance grid point.
GPModel gp_fit(const std::vector<FitSample>& samples,
               const std::vector<SEKernelParams>& grid,
               SEKernelParams* chosen = nullptr);

}  // namespace ipp

#endif
