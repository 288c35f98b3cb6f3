#ifndef IPP_LINALG_HPP
#define IPP_LINALG_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ipp {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major square-ish matrix, sized for the covariance blocks this
// project works with (a few hundred rows at most).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

// In-place lower Cholesky factor of a symmetric positive-definite matrix.
// Only the lower triangle of the input is read. Throws NumericalError when a
// pivot is not strictly positive.
class Cholesky {
 public:
  explicit Cholesky(Matrix a);

  std::size_t size() const { return l_.rows(); }
  const Matrix& factor() const { return l_; }
  double log_det() const;  // log det of the factored matrix

  // Solve L z = b (forward substitution), in place.
  void solve_lower(std::vector<double>& b) const;
  // Solve A x = b via the factor, in place.
  void solve(std::vector<double>& b) const;
  // Quadratic form b^T A^{-1} b.
  double quad_form(const std::vector<double>& b) const;
  // Diagonal of A^{-1}.
  std::vector<double> inverse_diagonal() const;

 private:
  Matrix l_;
};

}  // namespace ipp

#endif
