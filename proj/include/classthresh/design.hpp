#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "classthresh/distribution.hpp"
#include "classthresh/quantile.hpp"
#include "classthresh/rules.hpp"

namespace classthresh {

// Shift/scale alternative per class, with a shared miss budget (beta) and/or
// per-class miss budgets (beta_k).
struct AlternativeSpec {
  std::vector<double> delta;
  std::vector<double> sigma;
  std::optional<double> beta;
  std::optional<std::vector<double>> beta_k;

  void validate(std::size_t K) const;
  // Per-class budgets: beta_k when present, else beta replicated K times.
  std::vector<double> budgets(std::size_t K) const;
};

// Upper threshold envelope c*_k = delta_k + sigma_k * qf(budget_k).
std::vector<double> c_opt_star(const AlternativeSpec& alt,
                               const std::vector<double>& budgets,
                               const ScoreDistribution& scores);

// min d.g  s.t.  -sum(g) <= alpha - 1,  g_k <= cap_k,  g >= 0
// where cap_k = p_k * cdf(c*_k), capped at p_k (1 - 1e-12) to keep the
// induced quantile arguments strictly below 1. d selects the minority class.
struct LpInstance {
  std::vector<std::vector<double>> A;  // (K+1) x K
  std::vector<double> b;               // alpha - 1, then caps
  std::vector<double> d;               // e_{minority}
  std::vector<double> cap;             // caps only (rows 1..K of b)
  std::size_t minority = 0;            // argmin p_k, ties to lowest index
  double alpha = 0.0;
};

LpInstance build_lp(const ClassDistribution& dist, double alpha,
                    const std::vector<double>& c_star,
                    const ScoreDistribution& scores);

// Closed-form optimum: every class at its cap except the minority class,
// which keeps only the mass the level constraint still needs.
// Throws InfeasibleError when sum(cap) < 1 - alpha (reports the gap).
SubProbabilityVector solve_minority_greedy(const LpInstance& lp,
                                           const ClassDistribution& dist);

// Same LP through the two-phase simplex. The objective value matches the
// greedy solution on every feasible instance; the argmin need not be unique.
SubProbabilityVector solve_simplex_lp(const LpInstance& lp,
                                      const ClassDistribution& dist);

struct PowerReport {
  std::vector<double> conditional;  // 1 - cdf((c_k - delta_k) / sigma_k)
  double marginal = 0.0;            // sum_k p_k * conditional_k
};

PowerReport predicted_power(const ThresholdSet& thresholds,
                            const AlternativeSpec& alt,
                            const ClassDistribution& dist,
                            const ScoreDistribution& scores);

// One side of the optimality certificate: the threshold envelope induced by a
// budget set and the per-class comparisons against it.
struct EnvelopeCheck {
  std::vector<double> c_star;
  std::vector<double> cap;      // p_k * cdf(c*_k)
  std::vector<bool> ok;         // c_k <= c*_k
  bool all_ok = true;
};

// Certificate for a candidate threshold set under an alternative:
// level (false-alarm rate <= alpha), threshold envelopes from the shared
// and/or per-class budgets, and budget coherence sum_k p_k beta_k <= beta.
struct Theorem1Report {
  double alpha = 0.0;
  double false_alarm = 0.0;
  bool level_ok = false;
  std::vector<double> c;
  std::vector<double> g;  // p_k * cdf(c_k)
  std::optional<EnvelopeCheck> shared;     // from beta
  std::optional<EnvelopeCheck> per_class;  // from beta_k
  std::optional<double> budget_sum;        // sum p_k beta_k
  std::optional<bool> budget_ok;           // budget_sum <= beta
  std::optional<double> power_floor;       // 1 - sum p_k budget_k
  bool all_ok = false;
};

Theorem1Report verify_theorem1(const ThresholdSet& thresholds,
                               const AlternativeSpec& alt,
                               const ClassDistribution& dist, double alpha,
                               const ScoreDistribution& scores);

}  // namespace classthresh
