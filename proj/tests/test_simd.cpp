#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ipp/simd.hpp"

using namespace ipp;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n,
                               double lo = -10.0, double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

struct LevelGuard {
  simd::IsaLevel saved = simd::active();
  ~LevelGuard() { simd::force(saved); }
};

}  // namespace

TEST_CASE("dispatch reports a usable level") {
  const auto level = simd::active();
  CHECK((level == simd::IsaLevel::scalar || level == simd::IsaLevel::avx2));
  CHECK(simd::to_string(level).size() > 0);
}

TEST_CASE("scalar and avx2 kernels agree") {
  if (simd::best_supported() != simd::IsaLevel::avx2) {
    MESSAGE("avx2 unavailable; skipping equivalence checks");
    return;
  }
  LevelGuard guard;
  std::mt19937_64 rng(7);

  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 17u, 64u, 129u}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    simd::force(simd::IsaLevel::scalar);
    const double dot_s = simd::dot(x.data(), y.data(), n);
    std::vector<double> d2_s(n), e_s(n);
    simd::sq_dist(x.data(), y.data(), n, 0.3, -1.7, d2_s.data());
    simd::exp_scale(d2_s.data(), n, 2.5, -0.01, e_s.data());

    simd::force(simd::IsaLevel::avx2);
    const double dot_v = simd::dot(x.data(), y.data(), n);
    std::vector<double> d2_v(n), e_v(n);
    simd::sq_dist(x.data(), y.data(), n, 0.3, -1.7, d2_v.data());
    simd::exp_scale(d2_v.data(), n, 2.5, -0.01, e_v.data());

    CHECK(dot_v == doctest::Approx(dot_s).epsilon(1e-12));
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(d2_v[i] == d2_s[i]);  // same per-lane operations, bit-exact
      CHECK(e_v[i] == doctest::Approx(e_s[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("vectorized exp matches std::exp over a wide range") {
  if (simd::best_supported() != simd::IsaLevel::avx2) return;
  LevelGuard guard;
  simd::force(simd::IsaLevel::avx2);

  std::vector<double> d2;
  for (double v = 0.0; v < 1500.0; v += 0.37) d2.push_back(v);
  std::vector<double> out(d2.size());
  simd::exp_scale(d2.data(), d2.size(), 1.0, -0.5, out.data());
  for (std::size_t i = 0; i < d2.size(); ++i) {
    const double expected = std::exp(-0.5 * d2[i]);
    CHECK(out[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("forcing an unsupported level throws") {
  if (simd::best_supported() == simd::IsaLevel::avx2) return;
  CHECK_THROWS(simd::force(simd::IsaLevel::avx2));
}
