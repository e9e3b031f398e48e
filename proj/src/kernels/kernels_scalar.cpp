#include <cmath>
#include <cstdlib>
#include <cstring>

#include "classthresh/kernels.hpp"

namespace classthresh::kernels {

namespace {

inline double combine(const double acc[4]) {
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double sum_scalar(const double* x, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc[0] += x[i];
    acc[1] += x[i + 1];
    acc[2] += x[i + 2];
    acc[3] += x[i + 3];
  }
  for (; i < n; ++i) acc[i % 4] += x[i];
  return combine(acc);
}

double sum_sq_dev_scalar(const double* x, std::size_t n, double mu) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = x[i + l] - mu;
      acc[l] += d * d;
    }
  }
  for (; i < n; ++i) {
    const double d = x[i] - mu;
    acc[i % 4] += d * d;
  }
  return combine(acc);
}

inline double truncate(double v, double tau) {
  return (std::fabs(v) <= tau) ? v : 0.0;
}

double sum_truncated_scalar(const double* x, std::size_t n, double tau) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) acc[l] += truncate(x[i + l], tau);
  }
  for (; i < n; ++i) acc[i % 4] += truncate(x[i], tau);
  return combine(acc);
}

double sum_sq_dev_truncated_scalar(const double* x, std::size_t n, double mu,
                                   double tau) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double d = truncate(x[i + l], tau) - mu;
      acc[l] += d * d;
    }
  }
  for (; i < n; ++i) {
    const double d = truncate(x[i], tau) - mu;
    acc[i % 4] += d * d;
  }
  return combine(acc);
}

std::size_t count_greater_scalar(const double* x, std::size_t n, double bound) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > bound) ++count;
  }
  return count;
}

void standardize_scalar(const double* x, std::size_t n, double mu,
                        double inv_sigma, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mu) * inv_sigma;
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {
      "scalar",
      sum_scalar,
      sum_sq_dev_scalar,
      sum_truncated_scalar,
      sum_sq_dev_truncated_scalar,
      count_greater_scalar,
      standardize_scalar,
  };
  return ops;
}

const Ops& active_ops() {
  static const Ops& chosen = []() -> const Ops& {
    const char* pref = std::getenv("CLASSTHRESH_KERNELS");
    if (pref != nullptr) {
      if (std::strcmp(pref, "scalar") == 0) return scalar_ops();
      if (std::strcmp(pref, "avx2") == 0 && avx2_supported()) return avx2_ops();
    }
    return avx2_supported() ? avx2_ops() : scalar_ops();
  }();
  return chosen;
}

}  // namespace classthresh::kernels
