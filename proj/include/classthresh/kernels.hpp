#pragma once

#include <cstddef>

namespace classthresh::kernels {

// Data-parallel inner loops shared by estimation, resampling and evaluation.
// Every reduction uses the same fixed 4-lane blocked accumulation order
// (lane l sums elements with index = l mod 4; lanes combine as
// (l0+l1)+(l2+l3)), so all implementations return bitwise-identical results.
struct Ops {
  const char* name;
  double (*sum)(const double* x, std::size_t n);
  // sum over i of (x_i - mu)^2
  double (*sum_sq_dev)(const double* x, std::size_t n, double mu);
  // sum over i of x_i * 1(|x_i| <= tau)
  double (*sum_truncated)(const double* x, std::size_t n, double tau);
  // sum over i of (x_i * 1(|x_i| <= tau) - mu)^2
  double (*sum_sq_dev_truncated)(const double* x, std::size_t n, double mu,
                                 double tau);
  // #{ x_i > bound }
  std::size_t (*count_greater)(const double* x, std::size_t n, double bound);
  // out_i = (x_i - mu) * inv_sigma
  void (*standardize)(const double* x, std::size_t n, double mu,
                      double inv_sigma, double* out);
};

const Ops& scalar_ops();

// AVX2 variant; only valid to call when avx2_supported() is true.
const Ops& avx2_ops();

bool avx2_supported();

// Preferred implementation for this process: AVX2 when the CPU supports it,
// overridable with CLASSTHRESH_KERNELS=scalar|avx2 (read once).
const Ops& active_ops();

}  // namespace classthresh::kernels
