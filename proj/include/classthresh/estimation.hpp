#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "classthresh/design.hpp"
#include "classthresh/distribution.hpp"
#include "classthresh/rules.hpp"
#include "classthresh/sample.hpp"

namespace classthresh {

enum class StandardizationMode { kMarginal, kConditional };

// Location/scale map from raw measurements to scores. Moments are the ML
// (divide by n) forms computed from tau-truncated values x * 1(|x| <= tau);
// tau = +inf disables truncation. mu/sigma hold one entry (marginal) or one
// per class (conditional).
struct StandardizationModel {
  StandardizationMode mode = StandardizationMode::kMarginal;
  double tau = 0.0;
  std::vector<double> mu;
  std::vector<double> sigma;

  double mu_for(std::uint32_t k) const {
    return mode == StandardizationMode::kMarginal ? mu[0] : mu[k];
  }
  double sigma_for(std::uint32_t k) const {
    return mode == StandardizationMode::kMarginal ? sigma[0] : sigma[k];
  }
  // Score of a raw value from class k; single canonical expression so that
  // every path produces bitwise-identical residuals.
  double score(double x, std::uint32_t k) const {
    return (x - mu_for(k)) * (1.0 / sigma_for(k));
  }
};

// p_hat_k = count_k / n over the declared label set; unseen labels get 0.
ClassDistribution relative_frequencies(const LabeledSample& sample);

// Throws DataError when a class is empty (conditional mode) or a scale
// degenerates to zero.
StandardizationModel fit_standardization(const LabeledSample& sample,
                                         StandardizationMode mode, double tau);

// Scores of every record under the model, in record order.
std::vector<double> residuals(const LabeledSample& sample,
                              const StandardizationModel& model);

// ---- rule specifications ----
struct ProportionalRule {};
struct GammaProportionalRule {
  double gamma = 1.0;
};
struct ModifiedRule {
  ModifiedRuleParams params;
};
struct SubprobabilityRule {
  std::vector<double> g;
};
// One shared score cutoff qf(1 - alpha) for every class.
struct ConstantRule {};
// LP-optimal design under a shift/scale alternative. When c_star is set it
// overrides the envelope delta_k + sigma_k * qf(budget_k).
struct OptimalRule {
  AlternativeSpec alt;
  std::optional<std::vector<double>> c_star;
};

using RuleSpec = std::variant<ProportionalRule, GammaProportionalRule,
                              ModifiedRule, SubprobabilityRule, ConstantRule,
                              OptimalRule>;

std::string rule_name(const RuleSpec& spec);

// Extra diagnostics for LP-optimal fits.
struct OptimalFitInfo {
  std::vector<double> c_star;  // envelope actually used
  std::vector<double> cap;     // LP caps b_k
  double objective = 0.0;      // minority-class mass
  std::size_t minority = 0;
};

// A fitted rule: estimated class weights, standardization, score cutoffs and
// raw thresholds. Alarm: x > raw[z]. raw is the largest double whose score
// stays <= c, so raw-scale and score-scale decisions agree exactly.
struct EstimatedRule {
  ClassDistribution dist;
  StandardizationModel model;
  ThresholdSet standardized;
  std::vector<double> raw;
  std::optional<SubProbabilityVector> g;
  std::optional<OptimalFitInfo> optimal;
  std::string name;
};

EstimatedRule estimate_rule(const LabeledSample& sample, const RuleSpec& spec,
                            StandardizationMode mode, double tau, double alpha);

// Raw threshold backing out of a score cutoff: starts from mu + sigma * c and
// nudges by ulps until it is the largest double with score <= c.
double raw_threshold_from_score(double c, double mu, double sigma);

// Top-quantile split of a continuous covariate: high iff value >
// empirical_quantile(values, q) (strictly greater).
struct DichotomizeResult {
  double threshold = 0.0;
  std::vector<std::uint8_t> high;  // 1 = high class
  std::size_t n_high = 0;
};
DichotomizeResult dichotomize_top_quantile(const std::vector<double>& values,
                                           double q);

// Non-overlapping window sums scaled by h^{-1/2}; output length floor(T/h).
std::vector<double> cusum_transform(const std::vector<double>& series,
                                    std::size_t h);

}  // namespace classthresh
