#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "classthresh/estimation.hpp"
#include "classthresh/sample.hpp"

namespace classthresh {

// Alarm decisions on the raw scale: flag record i iff x_i > t[z_i]
// (strictly greater; boundary values do not alarm).
std::vector<std::uint8_t> apply_thresholds(const LabeledSample& sample,
                                           const std::vector<double>& raw);

// Same decisions through the score scale of a fitted rule:
// score(x_i) > c[z_i]. Agrees with the raw path on every record.
std::vector<std::uint8_t> apply_thresholds_scores(const LabeledSample& sample,
                                                  const EstimatedRule& rule);

struct ClassCells {
  std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;
};

struct EvaluationReport {
  std::vector<std::string> labels;
  std::vector<std::int64_t> n_k;
  std::vector<std::int64_t> alarms_k;
  std::vector<double> alarm_rate_k;
  std::int64_t n = 0;
  std::int64_t alarms = 0;
  double alarm_rate = 0.0;

  bool has_outcomes = false;
  std::vector<ClassCells> cells;                // per class
  std::vector<std::optional<double>> tpr_k;     // tp / (tp + fn)
  std::vector<std::optional<double>> tnr_k;     // tn / (tn + fp)
  std::optional<double> pooled_tpr;             // pooled cells
  std::optional<double> pooled_tnr;
  // Screening-yield overall rates: alarms / positives, 1 - alarms / negatives.
  std::optional<double> overall_tpr;
  std::optional<double> overall_tnr;
};

// Counts conserve: per class tp+fn+fp+tn = n_k, tp+fp = alarms_k.
EvaluationReport evaluate_thresholds(const LabeledSample& screen,
                                     const std::vector<double>& raw,
                                     const std::vector<std::string>& labels);

EvaluationReport evaluate_rule(const LabeledSample& screen,
                               const EstimatedRule& rule);

}  // namespace classthresh
