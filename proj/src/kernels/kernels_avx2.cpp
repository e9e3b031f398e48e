// AVX2 variants of the reduction kernels. This translation unit is compiled
// with -mavx2; callers must gate on avx2_supported().

#include "classthresh/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

#include <cmath>

namespace classthresh::kernels {

namespace {

// Lane l of the vector accumulator holds exactly the partial sums the scalar
// reference keeps in acc[l]; the combine order matches combine() there.
inline double reduce_lanes(__m256d v) {
  alignas(32) double a[4];
  _mm256_store_pd(a, v);
  return (a[0] + a[1]) + (a[2] + a[3]);
}

inline void spill(__m256d v, double a[4]) { _mm256_store_pd(a, v); }

inline double tail_combine(double acc[4], const double* x, std::size_t i,
                           std::size_t n) {
  for (; i < n; ++i) acc[i % 4] += x[i];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_avx2(const double* x, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
  }
  alignas(32) double a[4];
  spill(acc, a);
  return tail_combine(a, x, i, n);
}

double sum_sq_dev_avx2(const double* x, std::size_t n, double mu) {
  const __m256d muv = _mm256_set1_pd(mu);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), muv);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  alignas(32) double a[4];
  spill(acc, a);
  for (; i < n; ++i) {
    const double d = x[i] - mu;
    a[i % 4] += d * d;
  }
  return (a[0] + a[1]) + (a[2] + a[3]);
}

inline __m256d truncate_v(__m256d v, __m256d tau) {
  const __m256d absmask = _mm256_castsi256_pd(
      _mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d keep = _mm256_cmp_pd(_mm256_and_pd(v, absmask), tau, _CMP_LE_OQ);
  return _mm256_and_pd(v, keep);
}

inline double truncate_s(double v, double tau) {
  return (std::fabs(v) <= tau) ? v : 0.0;
}

double sum_truncated_avx2(const double* x, std::size_t n, double tau) {
  const __m256d tauv = _mm256_set1_pd(tau);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, truncate_v(_mm256_loadu_pd(x + i), tauv));
  }
  alignas(32) double a[4];
  spill(acc, a);
  for (; i < n; ++i) a[i % 4] += truncate_s(x[i], tau);
  return (a[0] + a[1]) + (a[2] + a[3]);
}

double sum_sq_dev_truncated_avx2(const double* x, std::size_t n, double mu,
                                 double tau) {
  const __m256d tauv = _mm256_set1_pd(tau);
  const __m256d muv = _mm256_set1_pd(mu);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d =
        _mm256_sub_pd(truncate_v(_mm256_loadu_pd(x + i), tauv), muv);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  alignas(32) double a[4];
  spill(acc, a);
  for (; i < n; ++i) {
    const double d = truncate_s(x[i], tau) - mu;
    a[i % 4] += d * d;
  }
  return (a[0] + a[1]) + (a[2] + a[3]);
}

std::size_t count_greater_avx2(const double* x, std::size_t n, double bound) {
  const __m256d bv = _mm256_set1_pd(bound);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d gt = _mm256_cmp_pd(_mm256_loadu_pd(x + i), bv, _CMP_GT_OQ);
    count += static_cast<std::size_t>(
        __builtin_popcount(static_cast<unsigned>(_mm256_movemask_pd(gt))));
  }
  for (; i < n; ++i) {
    if (x[i] > bound) ++count;
  }
  return count;
}

void standardize_avx2(const double* x, std::size_t n, double mu,
                      double inv_sigma, double* out) {
  const __m256d muv = _mm256_set1_pd(mu);
  const __m256d sv = _mm256_set1_pd(inv_sigma);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i,
                     _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), muv),
                                   sv));
  }
  for (; i < n; ++i) out[i] = (x[i] - mu) * inv_sigma;
}

}  // namespace

const Ops& avx2_ops() {
  static const Ops ops = {
      "avx2",
      sum_avx2,
      sum_sq_dev_avx2,
      sum_truncated_avx2,
      sum_sq_dev_truncated_avx2,
      count_greater_avx2,
      standardize_avx2,
  };
  return ops;
}

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

}  // namespace classthresh::kernels

#else  // !defined(__AVX2__)

namespace classthresh::kernels {

const Ops& avx2_ops() { return scalar_ops(); }

bool avx2_supported() { return false; }

}  // namespace classthresh::kernels

#endif
