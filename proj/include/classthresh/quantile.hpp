#pragma once

namespace classthresh {

// Distribution of standardized scores. quantile() is a (weakly) monotone
// inverse of cdf(); quantile(q) for q <= 0 returns the support infimum, which
// may be -inf for unbounded analytic models.
class ScoreDistribution {
 public:
  virtual ~ScoreDistribution() = default;
  virtual double cdf(double x) const = 0;
  virtual double quantile(double q) const = 0;  // q in [0, 1]; throws outside
  virtual double lower_endpoint() const = 0;    // value assigned to q = 0
};

// Standard normal scores.
class StdNormal final : public ScoreDistribution {
 public:
  double cdf(double x) const override;
  double quantile(double q) const override;
  double lower_endpoint() const override;
};

// Phi(x), full double precision via erfc.
double normal_cdf(double x);

// PhiInv(p) for p in [0, 1]; returns -inf at 0 and +inf at 1 (AS 241).
double normal_quantile(double p);

}  // namespace classthresh
