// AVX2 variants of the arithmetic kernels. Compiled with -mavx2 -mfma
// -ffp-contract=off; selected at runtime (see dispatch.cpp).

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "ipp/simd.hpp"

namespace ipp::simd::detail {

namespace {

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4),
                           _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i),
                           acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  double acc = _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

// Plain mul/add per lane so the result is bit-identical to the scalar kernel.
void sq_dist_avx2(const double* xs, const double* ys, std::size_t n, double px,
                  double py, double* out) {
  const __m256d vpx = _mm256_set1_pd(px);
  const __m256d vpy = _mm256_set1_pd(py);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vpx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vpy);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(dx, dx),
                                            _mm256_mul_pd(dy, dy)));
  }
  for (; i < n; ++i) {
    const double dx = xs[i] - px;
    const double dy = ys[i] - py;
    out[i] = dx * dx + dy * dy;
  }
}

// exp() by range reduction x = n*ln2 + r, |r| <= ln2/2, with a degree-13
// Taylor polynomial for exp(r) and exponent reassembly for 2^n.
__m256d exp_pd(__m256d x) {
  const __m256d max_x = _mm256_set1_pd(709.0);
  const __m256d min_x = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, min_x, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, min_x), max_x);

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

  __m256d nf = _mm256_round_pd(_mm256_mul_pd(x, log2e),
                               _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(nf, ln2_hi, x);
  r = _mm256_fnmadd_pd(nf, ln2_lo, r);

  const double inv_fact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0,
      1.0 / 3628800.0,    1.0 / 362880.0,    1.0 / 40320.0,
      1.0 / 5040.0,       1.0 / 720.0,       1.0 / 120.0,
      1.0 / 24.0,         1.0 / 6.0,         1.0 / 2.0};
  __m256d p = _mm256_set1_pd(inv_fact[0]);
  for (int k = 1; k < 12; ++k) {
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));
  }
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
  p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

  __m128i n32 = _mm256_cvtpd_epi32(nf);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  __m256i pow2 =
      _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  p = _mm256_mul_pd(p, _mm256_castsi256_pd(pow2));
  return _mm256_andnot_pd(underflow, p);
}

void exp_scale_avx2(const double* d2, std::size_t n, double amp, double scale,
                    double* out) {
  const __m256d vamp = _mm256_set1_pd(amp);
  const __m256d vscale = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d e = exp_pd(_mm256_mul_pd(vscale, _mm256_loadu_pd(d2 + i)));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(vamp, e));
  }
  for (; i < n; ++i) out[i] = amp * std::exp(scale * d2[i]);
}

}  // namespace

const KernelTable avx2_table = {dot_avx2, sq_dist_avx2, exp_scale_avx2};

}  // namespace ipp::simd::detail
