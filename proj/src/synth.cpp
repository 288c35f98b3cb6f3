#include "ipp/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ipp/linalg.hpp"

namespace ipp {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on our own uniforms; std::normal_distribution is not
// reproducible across standard libraries.
class NormalSource {
 public:
  explicit NormalSource(std::mt19937_64& rng) : rng_(rng) {}
  double next() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = uniform01(rng_);
    while (u1 <= 0.0) u1 = uniform01(rng_);
    const double u2 = uniform01(rng_);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64& rng_;
  double spare_ = 0.0;
  bool have_ = false;
};

}  // namespace

Dataset gen_synth(const SynthSpec& spec) {
  if (spec.locations < 2)
    throw ContractError("gen_synth: need at least 2 locations");
  if (spec.scans < 1) throw ContractError("gen_synth: need at least 1 scan");

  std::mt19937_64 rng(spec.seed);
  const std::size_t n = static_cast<std::size_t>(spec.locations);

  std::vector<double> xs(n), ys(n);
  const double cx = spec.width / 2.0;
  const double cy = spec.height / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      const double x = uniform01(rng) * spec.width;
      const double y = uniform01(rng) * spec.height;
      if (spec.elliptical_region) {
        const double nx = (x - cx) / (spec.width / 2.0);
        const double ny = (y - cy) / (spec.height / 2.0 * spec.ellipse_y_scale);
        if (nx * nx + ny * ny > 1.0) continue;
      }
      xs[i] = x;
      ys[i] = y;
      break;
    }
  }

  std::vector<LocationId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<LocationId>(i);
  const GPModel model = GPModel::from_kernel(ids, xs, ys, spec.kernel);
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const Cholesky chol(model.block(all));

  Dataset ds;
  ds.value_columns = static_cast<std::size_t>(spec.scans);
  ds.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.rows[i].id = ids[i];
    ds.rows[i].x = xs[i];
    ds.rows[i].y = ys[i];
    ds.rows[i].values.resize(ds.value_columns);
  }

  NormalSource normal(rng);
  std::vector<double> z(n);
  for (std::size_t scan = 0; scan < ds.value_columns; ++scan) {
    for (std::size_t i = 0; i < n; ++i) z[i] = normal.next();
    // value = L z, a draw from N(0, Sigma)
    for (std::size_t i = n; i-- > 0;) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= i; ++k) acc += chol.factor()(i, k) * z[k];
      ds.rows[i].values[scan] = acc;
    }
  }
  return ds;
}

SynthSpec lake_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.locations = 218;
  spec.width = 250.0;
  spec.height = 50.0;
  spec.kernel = {4.0, 30.0, 0.08};
  spec.scans = 2;
  spec.elliptical_region = true;
  spec.ellipse_y_scale = 0.64;
  spec.experiment_cost = 10.5;
  return spec;
}

SynthSpec berkeley_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.locations = 52;
  spec.width = 45.0;
  spec.height = 40.0;
  spec.kernel = {4.0, 9.0, 0.1};
  spec.scans = 2;
  spec.experiment_cost = 9.0;
  return spec;
}

SynthSpec precip_preset(std::uint64_t seed) {
  SynthSpec spec;
  spec.seed = seed;
  spec.locations = 167;
  spec.width = 7.0;
  spec.height = 9.0;
  spec.kernel = {1.0, 1.5, 0.05};
  spec.scans = 2;
  spec.experiment_cost = 1.4;
  return spec;
}

}  // namespace ipp
