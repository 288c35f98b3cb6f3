#include "ipp/linalg.hpp"

#include <cmath>
#include <string>

#include "ipp/simd.hpp"

namespace ipp {

Cholesky::Cholesky(Matrix a) : l_(std::move(a)) {
  const std::size_t n = l_.rows();
  if (n != l_.cols()) throw NumericalError("cholesky: matrix not square");
  for (std::size_t j = 0; j < n; ++j) {
    double d = l_(j, j) - simd::dot(l_.row(j), l_.row(j), j);
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NumericalError("cholesky: matrix not positive definite at pivot " +
                           std::to_string(j));
    }
    const double ljj = std::sqrt(d);
    l_(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      l_(i, j) = (l_(i, j) - simd::dot(l_.row(i), l_.row(j), j)) / ljj;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) l_(i, j) = 0.0;
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += std::log(l_(i, i));
  return 2.0 * s;
}

void Cholesky::solve_lower(std::vector<double>& b) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    b[i] = (b[i] - simd::dot(l_.row(i), b.data(), i)) / l_(i, i);
  }
}

void Cholesky::solve(std::vector<double>& b) const {
  const std::size_t n = size();
  solve_lower(b);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l_(k, ii) * b[k];
    b[ii] = s / l_(ii, ii);
  }
}

double Cholesky::quad_form(const std::vector<double>& b) const {
  std::vector<double> z = b;
  solve_lower(z);
  return simd::dot(z.data(), z.data(), z.size());
}

std::vector<double> Cholesky::inverse_diagonal() const {
  // A^{ -1 } = L^{-T} L^{-1}; diag entries are squared column norms of L^{-1}.
  const std::size_t n = size();
  std::vector<double> diag(n, 0.0);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    col[j] = 1.0;
    for (std::size_t i = j; i < n; ++i) {
      col[i] = (col[i] - simd::dot(l_.row(i) + j, col.data() + j, i - j)) /
               l_(i, i);
    }
    for (std::size_t i = j; i < n; ++i) diag[j] += col[i] * col[i];
  }
  return diag;
}

}  // namespace ipp
