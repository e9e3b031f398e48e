#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "classthresh/distribution.hpp"
#include "classthresh/quantile.hpp"

namespace classthresh {

// Per-class alarm cutoffs on the score scale, with the level they target.
// Alarm rule: flag a record with score u in class k iff u > c[k].
struct ThresholdSet {
  std::vector<double> c;  // one per class, ClassDistribution order
  double alpha = 0.0;     // global false-alarm budget the set was built for
};

// Admissibility of the gamma-proportional construction at a given level:
// every quantile argument (margin) must stay strictly below 1 where p_k > 0.
struct AdmissibilityReport {
  bool admissible = false;
  double alpha = 0.0;
  double gamma = 1.0;
  std::vector<double> margins;  // (1-alpha) p_k^gamma / sum_j p_j^{gamma+1}
};

AdmissibilityReport check_admissibility(const ClassDistribution& dist,
                                        double alpha, double gamma);

// c_k = qf((1-alpha) p_k^gamma / sum_j p_j^{gamma+1}); zero-probability
// classes get the score infimum. Throws InfeasibleError when inadmissible.
ThresholdSet gamma_proportional_thresholds(const ClassDistribution& dist,
                                           double gamma, double alpha,
                                           const ScoreDistribution& scores);

// gamma = 1 case; bitwise identical to gamma_proportional_thresholds(.., 1, ..).
ThresholdSet proportional_thresholds(const ClassDistribution& dist,
                                     double alpha,
                                     const ScoreDistribution& scores);

// Alarm mass implied by the gamma-proportional rule:
// g_k = (1-alpha) p_k^{gamma+1} / sum_j p_j^{gamma+1}.
SubProbabilityVector gamma_proportional_mass(const ClassDistribution& dist,
                                             double gamma, double alpha);

// Two-level variant: classes are ranked by ascending probability, the k0
// smallest share weight p_min and the rest share p_max. p_max may be given
// explicitly; otherwise it is derived from p_min and the ranked probabilities
// (k0 >= 2 required for the derivation). Requires every p_k > 0.
struct ModifiedRuleParams {
  std::size_t k0 = 1;  // 1-based split position, 1 <= k0 <= K-1
  double p_min = 0.0;
  std::optional<double> p_max;
};

ThresholdSet modified_thresholds(const ClassDistribution& dist,
                                 const ModifiedRuleParams& params, double alpha,
                                 const ScoreDistribution& scores);

// c_k = qf(g_k / p_k) with the score infimum on zero-probability classes.
// The returned set carries the implied level alpha = 1 - sum(g).
ThresholdSet thresholds_from_subprobability(const SubProbabilityVector& g,
                                            const ClassDistribution& dist,
                                            const ScoreDistribution& scores);

// sum_k p_k (1 - cdf(c_k)).
double false_alarm_rate(const ThresholdSet& thresholds,
                        const ClassDistribution& dist,
                        const ScoreDistribution& scores);

}  // namespace classthresh
