#include "classthresh/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "classthresh/errors.hpp"

namespace classthresh {

namespace {

void check_alpha(double alpha) {
  if (std::isnan(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
}

// p^gamma with the gamma = 1 fast path, so the proportional rule is bitwise
// identical to the gamma rule at gamma = 1.
double pow_gamma(double p, double gamma) {
  if (gamma == 1.0) return p;
  return std::pow(p, gamma);
}

// Quantile arguments q_k = (1-alpha) p_k^gamma / sum_j p_j^{gamma+1}.
std::vector<double> quantile_arguments(const ClassDistribution& dist,
                                       double gamma, double alpha) {
  double denom = 0.0;
  for (double p : dist.probs) denom += pow_gamma(p, gamma) * p;
  if (!(denom > 0.0)) {
    throw ValidationError("gamma-proportional rule: degenerate weight sum");
  }
  std::vector<double> q(dist.size(), 0.0);
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist.probs[k] > 0.0) {
      q[k] = (1.0 - alpha) * pow_gamma(dist.probs[k], gamma) / denom;
    }
  }
  return q;
}

}  // namespace

AdmissibilityReport check_admissibility(const ClassDistribution& dist,
                                        double alpha, double gamma) {
  dist.validate();
  check_alpha(alpha);
  if (std::isnan(gamma) || gamma <= 0.0) {
    throw ValidationError("gamma must be positive");
  }
  AdmissibilityReport report;
  report.alpha = alpha;
  report.gamma = gamma;
  report.margins = quantile_arguments(dist, gamma, alpha);
  report.admissible = true;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (dist.probs[k] > 0.0 && !(report.margins[k] < 1.0)) {
      report.admissible = false;
    }
  }
  return report;
}

ThresholdSet gamma_proportional_thresholds(const ClassDistribution& dist,
                                           double gamma, double alpha,
                                           const ScoreDistribution& scores) {
  AdmissibilityReport adm = check_admissibility(dist, alpha, gamma);
  if (!adm.admissible) {
    std::ostringstream msg;
    msg << "gamma-proportional rule inadmissible at alpha=" << alpha
        << ", gamma=" << gamma << ": quantile argument reaches 1";
    throw InfeasibleError(msg.str());
  }
  ThresholdSet out;
  out.alpha = alpha;
  out.c.resize(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    out.c[k] = (dist.probs[k] > 0.0) ? scores.quantile(adm.margins[k])
                                     : scores.lower_endpoint();
  }
  return out;
}

ThresholdSet proportional_thresholds(const ClassDistribution& dist,
                                     double alpha,
                                     const ScoreDistribution& scores) {
  return gamma_proportional_thresholds(dist, 1.0, alpha, scores);
}

SubProbabilityVector gamma_proportional_mass(const ClassDistribution& dist,
                                             double gamma, double alpha) {
  AdmissibilityReport adm = check_admissibility(dist, alpha, gamma);
  if (!adm.admissible) {
    throw InfeasibleError("gamma-proportional rule inadmissible: no valid "
                          "alarm mass");
  }
  SubProbabilityVector out;
  out.g.resize(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    out.g[k] = adm.margins[k] * dist.probs[k];
  }
  return out;
}

ThresholdSet modified_thresholds(const ClassDistribution& dist,
                                 const ModifiedRuleParams& params, double alpha,
                                 const ScoreDistribution& scores) {
  dist.validate();
  check_alpha(alpha);
  const std::size_t K = dist.size();
  if (K < 2) throw ValidationError("modified rule: needs at least 2 classes");
  for (double p : dist.probs) {
    if (!(p > 0.0)) {
      throw ValidationError("modified rule: every class probability must be "
                            "positive");
    }
  }
  if (params.k0 < 1 || params.k0 > K - 1) {
    throw ValidationError("modified rule: k0 must lie in [1, K-1]");
  }
  if (!(params.p_min > 0.0)) {
    throw ValidationError("modified rule: p_min must be positive");
  }

  // Stable ascending order by probability; ties keep input order.
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dist.probs[a] < dist.probs[b];
  });
  std::vector<double> ps(K);
  for (std::size_t i = 0; i < K; ++i) ps[i] = dist.probs[order[i]];

  if (!(ps[0] <= alpha)) {
    throw InfeasibleError("modified rule: smallest class probability must not "
                          "exceed alpha");
  }
  if (!(params.p_min >= alpha)) {
    throw InfeasibleError("modified rule: p_min must be at least alpha");
  }

  double head = 0.0;  // p_(1) + ... + p_(k0)
  for (std::size_t i = 0; i < params.k0; ++i) head += ps[i];
  const double tail = head - ps[0];  // p_(2) + ... + p_(k0)

  double p_max;
  if (params.p_max.has_value()) {
    p_max = *params.p_max;
  } else {
    if (params.k0 < 2) {
      throw ValidationError("modified rule: k0 = 1 needs an explicit p_max "
                            "(the derived form divides by an empty sum)");
    }
    p_max = params.p_min * head / tail;
  }
  if (!(p_max >= params.p_min)) {
    throw InfeasibleError("modified rule: p_max must be at least p_min");
  }
  // Weight-ratio condition that keeps every quantile argument below 1.
  if (params.k0 >= 2 && !(params.p_min / p_max >= tail / head - 1e-15)) {
    throw InfeasibleError("modified rule: p_min/p_max below the ranked "
                          "probability ratio");
  }

  std::vector<double> weight(K);  // per sorted position
  for (std::size_t i = 0; i < K; ++i) {
    weight[i] = (i < params.k0) ? params.p_min : p_max;
  }
  double denom = 0.0;
  for (std::size_t i = 0; i < K; ++i) denom += ps[i] * weight[i];

  ThresholdSet out;
  out.alpha = alpha;
  out.c.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double arg = (1.0 - alpha) * weight[i] / denom;
    if (!(arg < 1.0)) {
      throw InfeasibleError("modified rule: quantile argument reaches 1");
    }
    out.c[order[i]] = scores.quantile(arg);
  }
  return out;
}

ThresholdSet thresholds_from_subprobability(const SubProbabilityVector& g,
                                            const ClassDistribution& dist,
                                            const ScoreDistribution& scores) {
  dist.validate();
  g.validate(dist);
  ThresholdSet out;
  out.alpha = g.implied_alpha();
  out.c.resize(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) {
    out.c[k] = (dist.probs[k] > 0.0) ? scores.quantile(g.g[k] / dist.probs[k])
                                     : scores.lower_endpoint();
  }
  return out;
}

double false_alarm_rate(const ThresholdSet& thresholds,
                        const ClassDistribution& dist,
                        const ScoreDistribution& scores) {
  if (thresholds.c.size() != dist.size()) {
    throw ValidationError("false_alarm_rate: threshold/class size mismatch");
  }
  double rate = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    rate += dist.probs[k] * (1.0 - scores.cdf(thresholds.c[k]));
  }
  return rate;
}

}  // namespace classthresh
