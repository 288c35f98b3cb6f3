#include <cmath>
#include <cstddef>

#include "ipp/simd.hpp"

namespace ipp::simd::detail {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void sq_dist_scalar(const double* xs, const double* ys, std::size_t n,
                    double px, double py, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    out[i] = dx * dx + dy * dy;
  }
}

void exp_scale_scalar(const double* d2, std::size_t n, double amp,
                      double scale, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = amp * std::exp(scale * d2[i]);
}

}  // namespace

const KernelTable scalar_table = {dot_scalar, sq_dist_scalar,
                                  exp_scale_scalar};

}  // namespace ipp::simd::detail
