#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "ipp/simd.hpp"

namespace ipp::simd {

namespace {

const detail::KernelTable* table_for([[maybe_unused]] IsaLevel level) {
#ifdef IPP_HAVE_AVX2_TU
  if (level == IsaLevel::avx2) return &detail::avx2_table;
#endif
  return &detail::scalar_table;
}

IsaLevel probe() {
#ifdef IPP_HAVE_AVX2_TU
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return IsaLevel::avx2;
#endif
  return IsaLevel::scalar;
}

IsaLevel initial_level() {
  if (const char* env = std::getenv("IPP_SIMD")) {
    if (std::strcmp(env, "scalar") == 0) return IsaLevel::scalar;
    if (std::strcmp(env, "avx2") == 0 && probe() == IsaLevel::avx2)
      return IsaLevel::avx2;
  }
  return probe();
}

struct Dispatch {
  std::atomic<const detail::KernelTable*> table;
  std::atomic<IsaLevel> level;
  Dispatch() {
    const IsaLevel l = initial_level();
    level = l;
    table = table_for(l);
  }
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

IsaLevel best_supported() { return probe(); }

IsaLevel active() { return dispatch().level.load(); }

void force(IsaLevel level) {
  if (level == IsaLevel::avx2 && probe() != IsaLevel::avx2)
    throw std::runtime_error("simd: avx2 not supported on this host");
  dispatch().level.store(level);
  dispatch().table.store(table_for(level));
}

std::string to_string(IsaLevel level) {
  return level == IsaLevel::avx2 ? "avx2" : "scalar";
}

double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().table.load()->dot(x, y, n);
}

void sq_dist(const double* xs, const double* ys, std::size_t n, double px,
             double py, double* out) {
  dispatch().table.load()->sq_dist(xs, ys, n, px, py, out);
}

void exp_scale(const double* d2, std::size_t n, double amp, double scale,
               double* out) {
  dispatch().table.load()->exp_scale(d2, n, amp, scale, out);
}

}  // namespace ipp::simd
