#ifndef IPP_SIMD_HPP
#define IPP_SIMD_HPP

#include <cstddef>
#include <string>

namespace ipp::simd {

// Instruction-set level used by the arithmetic kernels. The active level is
// chosen at startup from CPU capabilities; the IPP_SIMD environment variable
// ("scalar" or "avx2") overrides the probe. force() exists so equivalence
// tests can run both variants in one process.
enum class IsaLevel { scalar, avx2 };

IsaLevel best_supported();
IsaLevel active();
void force(IsaLevel level);  // throws std::runtime_error if unsupported
std::string to_string(IsaLevel level);

// dot = sum_i x[i]*y[i]
double dot(const double* x, const double* y, std::size_t n);

// out[i] = (xs[i]-px)^2 + (ys[i]-py)^2
void sq_dist(const double* xs, const double* ys, std::size_t n,
             double px, double py, double* out);

// out[i] = amp * exp(scale * d2[i]); scale is expected to be <= 0
void exp_scale(const double* d2, std::size_t n, double amp, double scale,
               double* out);

namespace detail {
struct KernelTable {
  double (*dot)(const double*, const double*, std::size_t);
  void (*sq_dist)(const double*, const double*, std::size_t, double, double,
                  double*);
  void (*exp_scale)(const double*, std::size_t, double, double, double*);
};
extern const KernelTable scalar_table;
#ifdef IPP_HAVE_AVX2_TU
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace ipp::simd

#endif
