#pragma once

#include <cstddef>
#include <vector>

#include "classthresh/quantile.hpp"

namespace classthresh {

// Empirical distribution of a finite sample. quantile() is the
// left-continuous generalized inverse of cdf(): the order statistic at the
// smallest 1-based rank m with m/n >= q, evaluated so that
//   quantile(q) <= u  <=>  q <= cdf(u)
// holds exactly in double arithmetic, ties included.
class EmpiricalDistribution final : public ScoreDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> values);

  double cdf(double u) const override;       // #{x_i <= u} / n
  double quantile(double q) const override;  // q in [0, 1]
  double lower_endpoint() const override;    // sample minimum

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

}  // namespace classthresh
