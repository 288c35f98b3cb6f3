#include "ipp/reward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ipp/gain_oracle.hpp"
#include "ipp/simd.hpp"

namespace ipp {

namespace {

std::shared_ptr<const GPModel> borrow(const GPModel& model) {
  return std::shared_ptr<const GPModel>(std::shared_ptr<void>(), &model);
}

}  // namespace

GPModel GPModel::from_kernel(const std::vector<LocationId>& ids,
                             const std::vector<double>& xs,
                             const std::vector<double>& ys,
                             const SEKernelParams& params) {
  const std::size_t n = ids.size();
  if (xs.size() != n || ys.size() != n)
    throw ContractError("gp model: coordinate/id size mismatch");
  if (!(params.signal_variance > 0.0) || !(params.lengthscale > 0.0) ||
      !(params.noise_variance >= 0.0))
    throw ContractError("gp model: invalid kernel parameters");

  GPModel m;
  m.ids_ = ids;
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.index_.emplace(ids[i], i).second)
      throw ContractError("gp model: duplicate location id");
  }
  m.cov_ = Matrix(n, n);
  const double scale = -0.5 / (params.lengthscale * params.lengthscale);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    simd::sq_dist(xs.data(), ys.data(), n, xs[i], ys[i], d2.data());
    simd::exp_scale(d2.data(), n, params.signal_variance, scale, m.cov_.row(i));
    m.cov_(i, i) += params.noise_variance;
  }
  m.jitter_ = 1e-10 * params.signal_variance;
  m.params_ = params;
  return m;
}

GPModel GPModel::from_covariance(std::vector<LocationId> ids, Matrix sigma,
                                 double noise_variance) {
  const std::size_t n = ids.size();
  if (sigma.rows() != n || sigma.cols() != n)
    throw ContractError("gp model: covariance size mismatch");
  GPModel m;
  m.ids_ = std::move(ids);
  for (std::size_t i = 0; i < n; ++i) {
    if (!m.index_.emplace(m.ids_[i], i).second)
      throw ContractError("gp model: duplicate location id");
  }
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sigma(i, i) += noise_variance;
    max_diag = std::max(max_diag, sigma(i, i));
  }
  m.cov_ = std::move(sigma);
  m.jitter_ = 1e-10 * max_diag;
  return m;
}

std::size_t GPModel::index_of(LocationId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownLocationError(id);
  return it->second;
}

Matrix GPModel::block(const std::vector<std::size_t>& idx) const {
  const std::size_t m = idx.size();
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out(i, j) = cov_(idx[i], idx[j]);
    out(i, i) += jitter_;
  }
  return out;
}

std::vector<std::size_t> GPModel::indices_of(const IdSet& set) const {
  std::vector<std::size_t> idx;
  idx.reserve(set.size());
  for (LocationId id : set) idx.push_back(index_of(id));
  return idx;
}

double RewardFunction::gain(const IdSet& set, LocationId v) const {
  return eval(set.with(v)) - eval(set);
}

bool RewardFunction::evaluable(const IdSet&) const { return true; }

double marginal_gain(const RewardFunction& fn, const IdSet& set,
                     LocationId v) {
  if (set.contains(v))
    throw ContractError("marginal_gain: location already in set");
  return fn.gain(set, v);
}

std::shared_ptr<const RewardFunction> residual(
    std::shared_ptr<const RewardFunction> fn, const IdSet& committed) {
  if (auto res = std::dynamic_pointer_cast<const ResidualReward>(fn)) {
    return std::make_shared<ResidualReward>(
        res->base(), res->committed().united(committed));
  }
  return std::make_shared<ResidualReward>(std::move(fn), committed);
}

double ModularReward::eval(const IdSet& set) const {
  double total = 0.0;
  for (LocationId id : set) total += reward_of(id);
  return total;
}

double ModularReward::gain(const IdSet&, LocationId v) const {
  return reward_of(v);
}

double ModularReward::reward_of(LocationId v) const {
  auto it = table_.find(v);
  return it == table_.end() ? 0.0 : it->second;
}

MutualInformationReward::MutualInformationReward(
    std::shared_ptr<const GPModel> model, bool cache_enabled)
    : model_(std::move(model)), cache_enabled_(cache_enabled) {}

bool MutualInformationReward::evaluable(const IdSet& set) const {
  if (set.size() + 1 > model_->size()) return false;
  for (LocationId id : set)
    if (!model_->has(id)) return false;
  return true;
}

double MutualInformationReward::log_det(const IdSet& set) const {
  if (set.empty()) return 0.0;
  if (cache_enabled_) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = log_det_cache_.find(set);
    if (it != log_det_cache_.end()) return it->second;
  }
  const double value = Cholesky(model_->block(model_->indices_of(set))).log_det();
  if (cache_enabled_) {
    std::lock_guard<std::mutex> lock(mutex_);
    log_det_cache_.emplace(set, value);
  }
  return value;
}

double MutualInformationReward::eval(const IdSet& set) const {
  if (set.empty()) return 0.0;
  if (set.size() + 1 > model_->size())
    throw ContractError("mi: set must be a strict subset of the model");
  std::vector<LocationId> comp;
  comp.reserve(model_->size() - set.size());
  for (LocationId id : model_->ids())
    if (!set.contains(id)) comp.push_back(id);
  if (comp.size() + set.size() != model_->size())
    throw ContractError("mi: set contains ids outside the model");
  // MI(A) = H(A) + H(V\A) - H(V), with the (2 pi e) terms cancelling.
  return 0.5 * (log_det(set) + log_det(IdSet(std::move(comp))) -
                log_det(model_->all_ids()));
}

ResidualReward::ResidualReward(std::shared_ptr<const RewardFunction> base,
                               IdSet committed)
    : base_(std::move(base)), committed_(std::move(committed)) {
  base_value_ = committed_.empty() ? 0.0 : base_->eval(committed_);
}

double ResidualReward::eval(const IdSet& set) const {
  if (set.empty() && committed_.empty()) return 0.0;
  return base_->eval(set.united(committed_)) - base_value_;
}

double ResidualReward::gain(const IdSet& set, LocationId v) const {
  if (committed_.contains(v)) return 0.0;
  return base_->gain(set.united(committed_), v);
}

bool ResidualReward::evaluable(const IdSet& set) const {
  return base_->evaluable(set.united(committed_));
}

struct MiGainSession::CholAppend {
  std::vector<std::vector<double>> rows;

  std::size_t size() const { return rows.size(); }

  void append(std::vector<double> cov_with_prev, double diag) {
    const std::size_t m = rows.size();
    for (std::size_t i = 0; i < m; ++i) {
      cov_with_prev[i] =
          (cov_with_prev[i] - simd::dot(rows[i].data(), cov_with_prev.data(), i)) /
          rows[i][i];
    }
    const double piv = diag - simd::dot(cov_with_prev.data(),
                                        cov_with_prev.data(), m);
    if (!(piv > 0.0) || !std::isfinite(piv))
      throw NumericalError("mi session: non-positive pivot while appending");
    cov_with_prev.push_back(std::sqrt(piv));
    rows.push_back(std::move(cov_with_prev));
  }

  double quad_form(std::vector<double> b) const {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      b[i] = (b[i] - simd::dot(rows[i].data(), b.data(), i)) / rows[i][i];
    }
    return simd::dot(b.data(), b.data(), rows.size());
  }

  void truncate(std::size_t new_size) { rows.resize(new_size); }
};

MiGainSession::~MiGainSession() = default;
MiGainSession::MiGainSession(MiGainSession&&) noexcept = default;
MiGainSession& MiGainSession::operator=(MiGainSession&&) noexcept = default;

MiGainSession::MiGainSession(std::shared_ptr<const GPModel> model,
                             const IdSet& committed)
    : model_(std::move(model)), committed_(committed) {
  base_idx_ = model_->indices_of(committed_);
  if (committed_.size() + 1 > model_->size())
    throw ContractError("mi session: committed set must leave the complement nonempty");

  comp_pos_.assign(model_->size(), std::numeric_limits<std::size_t>::max());
  std::vector<LocationId> comp_ids;
  for (LocationId id : model_->ids())
    if (!committed_.contains(id)) comp_ids.push_back(id);
  std::sort(comp_ids.begin(), comp_ids.end());
  for (LocationId id : comp_ids) {
    const std::size_t mi = model_->index_of(id);
    comp_pos_[mi] = comp_idx_.size();
    comp_idx_.push_back(mi);
  }

  // Static factors shared by all push/pop states.
  chol_active_ = std::make_unique<CholAppend>();
  if (!base_idx_.empty()) {
    Cholesky chol(model_->block(base_idx_));
    for (std::size_t i = 0; i < chol.size(); ++i) {
      std::vector<double> row(chol.factor().row(i),
                              chol.factor().row(i) + i + 1);
      chol_active_->rows.push_back(std::move(row));
    }
  }
  {
    Cholesky chol(model_->block(comp_idx_));
    const std::size_t m = comp_idx_.size();
    comp_inverse_ = Matrix(m, m);
    std::vector<double> col(m);
    for (std::size_t j = 0; j < m; ++j) {
      std::fill(col.begin(), col.end(), 0.0);
      col[j] = 1.0;
      chol.solve(col);
      for (std::size_t i = 0; i < m; ++i) comp_inverse_(i, j) = col[i];
    }
  }
  chol_mss_ = std::make_unique<CholAppend>();
}

IdSet MiGainSession::active() const {
  return committed_.united(IdSet(pushed_));
}

bool MiGainSession::evaluable(LocationId v) const {
  if (!model_->has(v)) return false;
  const std::size_t mi = model_->index_of(v);
  if (comp_pos_[mi] == std::numeric_limits<std::size_t>::max()) return false;
  for (LocationId p : pushed_)
    if (p == v) return false;
  // The complement after selecting v must stay nonempty.
  return comp_idx_.size() >= pushed_.size() + 2;
}

double MiGainSession::conditional_variance_given_active(LocationId v) const {
  const std::size_t vi = model_->index_of(v);
  const Matrix& cov = model_->cov();
  const double diag = cov(vi, vi) + model_->jitter();
  const std::size_t m = chol_active_->size();
  if (m == 0) return diag;
  std::vector<double> k(m);
  for (std::size_t i = 0; i < base_idx_.size(); ++i)
    k[i] = cov(vi, base_idx_[i]);
  for (std::size_t i = 0; i < pushed_idx_.size(); ++i)
    k[base_idx_.size() + i] = cov(vi, pushed_idx_[i]);
  const double var = diag - chol_active_->quad_form(std::move(k));
  if (!(var > 0.0))
    throw NumericalError("mi session: non-positive conditional variance");
  return var;
}

double MiGainSession::complement_precision(LocationId v) const {
  const std::size_t pos = comp_pos_[model_->index_of(v)];
  const double mvv = comp_inverse_(pos, pos);
  if (pushed_.empty()) return mvv;
  std::vector<double> w(pushed_.size());
  for (std::size_t i = 0; i < pushed_idx_.size(); ++i)
    w[i] = comp_inverse_(pos, comp_pos_[pushed_idx_[i]]);
  const double prec = mvv - chol_mss_->quad_form(std::move(w));
  if (!(prec > 0.0))
    throw NumericalError("mi session: non-positive complement precision");
  return prec;
}

double MiGainSession::gain(LocationId v) const {
  if (!evaluable(v))
    throw ContractError("mi session: gain undefined for this location");
  const double var_given_active = conditional_variance_given_active(v);
  const double prec = complement_precision(v);
  return 0.5 * std::log(var_given_active * prec);
}

void MiGainSession::push(LocationId v) {
  if (!evaluable(v))
    throw ContractError("mi session: cannot push this location");
  const std::size_t vi = model_->index_of(v);
  const Matrix& cov = model_->cov();

  std::vector<double> k(chol_active_->size());
  for (std::size_t i = 0; i < base_idx_.size(); ++i)
    k[i] = cov(vi, base_idx_[i]);
  for (std::size_t i = 0; i < pushed_idx_.size(); ++i)
    k[base_idx_.size() + i] = cov(vi, pushed_idx_[i]);
  chol_active_->append(std::move(k), cov(vi, vi) + model_->jitter());

  const std::size_t pos = comp_pos_[vi];
  std::vector<double> w(pushed_.size());
  for (std::size_t i = 0; i < pushed_idx_.size(); ++i)
    w[i] = comp_inverse_(pos, comp_pos_[pushed_idx_[i]]);
  chol_mss_->append(std::move(w), comp_inverse_(pos, pos));

  pushed_.push_back(v);
  pushed_idx_.push_back(vi);
}

double MiGainSession::push_set(const IdSet& set) {
  double total = 0.0;
  for (LocationId id : set) {
    total += gain(id);
    push(id);
  }
  return total;
}

void MiGainSession::pop(std::size_t count) {
  if (count > pushed_.size())
    throw ContractError("mi session: pop underflow");
  const std::size_t keep = pushed_.size() - count;
  pushed_.resize(keep);
  pushed_idx_.resize(keep);
  chol_active_->truncate(base_idx_.size() + keep);
  chol_mss_->truncate(keep);
}

double mi_evaluate(const GPModel& model, const IdSet& set) {
  return MutualInformationReward(borrow(model), false).eval(set);
}

namespace {

class MiOracle : public GainOracle {
 public:
  MiOracle(std::shared_ptr<const GPModel> model, const IdSet& committed)
      : session_(std::move(model), committed) {}
  bool evaluable(LocationId v) const override { return session_.evaluable(v); }
  double gain(LocationId v) const override { return session_.gain(v); }
  void push(LocationId v) override { session_.push(v); }
  void pop(std::size_t count) override { session_.pop(count); }
  std::size_t depth() const override { return session_.depth(); }
  IdSet active() const override { return session_.active(); }

 private:
  MiGainSession session_;
};

class GenericOracle : public GainOracle {
 public:
  GenericOracle(std::shared_ptr<const RewardFunction> fn, IdSet committed)
      : fn_(std::move(fn)), committed_(std::move(committed)) {
    current_ = committed_;
  }
  bool evaluable(LocationId v) const override {
    return !current_.contains(v) && fn_->evaluable(current_.with(v));
  }
  double gain(LocationId v) const override { return fn_->gain(current_, v); }
  void push(LocationId v) override {
    if (!evaluable(v)) throw ContractError("gain oracle: cannot push");
    stack_.push_back(v);
    current_ = current_.with(v);
  }
  void pop(std::size_t count) override {
    if (count > stack_.size()) throw ContractError("gain oracle: pop underflow");
    stack_.resize(stack_.size() - count);
    std::vector<LocationId> ids(stack_.begin(), stack_.end());
    current_ = committed_.united(IdSet(std::move(ids)));
  }
  std::size_t depth() const override { return stack_.size(); }
  IdSet active() const override { return current_; }

 private:
  std::shared_ptr<const RewardFunction> fn_;
  IdSet committed_;
  IdSet current_;
  std::vector<LocationId> stack_;
};

}  // namespace

std::unique_ptr<GainOracle> make_gain_oracle(
    std::shared_ptr<const RewardFunction> fn, const IdSet& committed) {
  if (auto res = std::dynamic_pointer_cast<const ResidualReward>(fn)) {
    // Residual gains are base gains against the enlarged committed set.
    return make_gain_oracle(res->base(), res->committed().united(committed));
  }
  if (auto mi = std::dynamic_pointer_cast<const MutualInformationReward>(fn)) {
    if (committed.size() + 1 < mi->model().size())
      return std::make_unique<MiOracle>(mi->model_ptr(), committed);
  }
  return std::make_unique<GenericOracle>(std::move(fn), committed);
}

std::map<LocationId, Posterior> gp_posterior(
    const GPModel& model, const std::map<LocationId, double>& observed) {
  std::vector<std::size_t> a_idx;
  std::vector<double> y;
  a_idx.reserve(observed.size());
  for (const auto& [id, value] : observed) {
    a_idx.push_back(model.index_of(id));
    y.push_back(value);
  }

  std::map<LocationId, Posterior> out;
  const Matrix& cov = model.cov();
  if (a_idx.empty()) {
    for (std::size_t i = 0; i < model.size(); ++i)
      out[model.ids()[i]] = {0.0, cov(i, i)};
    return out;
  }

  std::unique_ptr<Cholesky> chol;
  try {
    chol = std::make_unique<Cholesky>(model.block(a_idx));
  } catch (const NumericalError&) {
    throw NumericalError("gp_posterior: singular observation covariance");
  }
  std::vector<double> alpha = y;
  chol->solve(alpha);

  const std::size_t m = a_idx.size();
  std::vector<double> k(m);
  for (std::size_t u = 0; u < model.size(); ++u) {
    const LocationId uid = model.ids()[u];
    if (observed.count(uid)) continue;
    for (std::size_t j = 0; j < m; ++j) k[j] = cov(u, a_idx[j]);
    const double mean = simd::dot(k.data(), alpha.data(), m);
    double var = cov(u, u) - chol->quad_form(k);
    if (var < 0.0) var = 0.0;
    out[uid] = {mean, var};
  }
  return out;
}

GPModel gp_fit(const std::vector<FitSample>& samples,
               const std::vector<SEKernelParams>& grid,
               SEKernelParams* chosen) {
  if (samples.size() < 3) throw ContractError("gp_fit: need at least 3 samples");
  if (grid.empty()) throw ContractError("gp_fit: empty hyperparameter grid");

  const std::size_t n = samples.size();
  std::vector<LocationId> ids(n);
  std::vector<double> xs(n), ys(n), values(n);
  for (std::size_t i = 0; i < n; ++i) {
    ids[i] = static_cast<LocationId>(i);
    xs[i] = samples[i].x;
    ys[i] = samples[i].y;
    values[i] = samples[i].value;
  }

  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  if (*mn == *mx) {
    // Constant data carries no covariance signal; take the smallest
    // signal variance available.
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
      if (grid[g].signal_variance < grid[best].signal_variance) best = g;
    if (chosen) *chosen = grid[best];
    return GPModel::from_kernel(ids, xs, ys, grid[best]);
  }

  double best_lml = -std::numeric_limits<double>::infinity();
  std::size_t best = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    GPModel m = GPModel::from_kernel(ids, xs, ys, grid[g]);
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    double lml;
    try {
      Cholesky chol(m.block(all));
      lml = -0.5 * (chol.quad_form(values) + chol.log_det() +
                    static_cast<double>(n) * std::log(2.0 * std::numbers::pi));
    } catch (const NumericalError&) {
      continue;
    }
    if (lml > best_lml) {
      best_lml = lml;
      best = g;
    }
  }
  if (chosen) *chosen = grid[best];
  return GPModel::from_kernel(ids, xs, ys, grid[best]);
}

}  // namespace ipp
