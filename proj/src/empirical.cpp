#include "classthresh/empirical.hpp"

#include <algorithm>
#include <cmath>

#include "classthresh/errors.hpp"

namespace classthresh {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> values)
    : sorted_(std::move(values)) {
  if (sorted_.empty()) {
    throw ValidationError("empirical distribution: empty sample");
  }
  for (double v : sorted_) {
    if (std::isnan(v)) {
      throw ValidationError("empirical distribution: NaN in sample");
    }
  }
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double u) const {
  const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), u);
  const auto count = static_cast<double>(it - sorted_.begin());
  return count / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::quantile(double q) const {
  if (std::isnan(q) || q < 0.0 || q > 1.0) {
    throw ValidationError("empirical quantile: argument must lie in [0, 1]");
  }
  if (q == 0.0) return lower_endpoint();
  const std::size_t n = sorted_.size();
  const double dn = static_cast<double>(n);
  // Smallest rank m with m/n >= q, decided with the same double division that
  // cdf() performs; this is what makes the Galois connection exact.
  double guess = std::ceil(q * dn);
  if (guess < 1.0) guess = 1.0;
  if (guess > dn) guess = dn;
  auto m = static_cast<std::size_t>(guess);
  while (m > 1 && static_cast<double>(m - 1) / dn >= q) --m;
  while (static_cast<double>(m) / dn < q && m < n) ++m;
  return sorted_[m - 1];
}

double EmpiricalDistribution::lower_endpoint() const { return sorted_.front(); }

}  // namespace classthresh
