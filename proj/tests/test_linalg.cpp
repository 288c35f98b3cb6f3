#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "ipp/linalg.hpp"

using namespace ipp;

namespace {

Matrix random_spd(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix b(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b(i, j) = dist(rng);
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b(k, i) * b(k, j);
      a(i, j) = s + (i == j ? static_cast<double>(n) : 0.0);
    }
  }
  return a;
}

}  // namespace

TEST_CASE("cholesky reproduces a 2x2 factor exactly") {
  Matrix a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = a(1, 0) = 2.0;
  a(1, 1) = 5.0;
  Cholesky chol(a);
  CHECK(chol.factor()(0, 0) == doctest::Approx(2.0));
  CHECK(chol.factor()(1, 0) == doctest::Approx(1.0));
  CHECK(chol.factor()(1, 1) == doctest::Approx(2.0));
  CHECK(chol.log_det() == doctest::Approx(std::log(16.0)));
}

TEST_CASE("factorization satisfies L L^T = A on random SPD matrices") {
  std::mt19937_64 rng(11);
  for (std::size_t n : {1u, 2u, 5u, 17u, 40u}) {
    Matrix a = random_spd(rng, n);
    Cholesky chol(a);
    const Matrix& l = chol.factor();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k <= j; ++k) s += l(i, k) * l(j, k);
        CHECK(s == doctest::Approx(a(i, j)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("solve returns the linear system solution") {
  std::mt19937_64 rng(5);
  const std::size_t n = 12;
  Matrix a = random_spd(rng, n);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<double> x_true(n);
  for (double& v : x_true) v = dist(rng);

  std::vector<double> b(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i] += a(i, j) * x_true[j];

  Cholesky chol(a);
  std::vector<double> x = b;
  chol.solve(x);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(x[i] == doctest::Approx(x_true[i]).epsilon(1e-8));

  double quad_direct = 0.0;
  for (std::size_t i = 0; i < n; ++i) quad_direct += b[i] * x_true[i];
  CHECK(chol.quad_form(b) == doctest::Approx(quad_direct).epsilon(1e-8));
}

TEST_CASE("inverse diagonal matches per-column solves") {
  std::mt19937_64 rng(23);
  const std::size_t n = 9;
  Matrix a = random_spd(rng, n);
  Cholesky chol(a);
  const auto diag = chol.inverse_diagonal();
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    chol.solve(e);
    CHECK(diag[j] == doctest::Approx(e[j]).epsilon(1e-9));
  }
}

TEST_CASE("non positive definite input throws") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  CHECK_THROWS_AS(Cholesky{a}, NumericalError);
}
