#include "classthresh/evaluation.hpp"

#include "classthresh/errors.hpp"

namespace classthresh {

std::vector<std::uint8_t> apply_thresholds(const LabeledSample& sample,
                                           const std::vector<double>& raw) {
  sample.validate();
  if (raw.size() != sample.labels.size()) {
    throw ValidationError("apply_thresholds: threshold/class size mismatch");
  }
  std::vector<std::uint8_t> alarms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    alarms[i] = sample.x[i] > raw[sample.z[i]] ? 1 : 0;
  }
  return alarms;
}

std::vector<std::uint8_t> apply_thresholds_scores(const LabeledSample& sample,
                                                  const EstimatedRule& rule) {
  sample.validate();
  if (rule.standardized.c.size() != sample.labels.size()) {
    throw ValidationError("apply_thresholds: threshold/class size mismatch");
  }
  std::vector<std::uint8_t> alarms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const std::uint32_t k = sample.z[i];
    alarms[i] =
        rule.model.score(sample.x[i], k) > rule.standardized.c[k] ? 1 : 0;
  }
  return alarms;
}

namespace {

EvaluationReport build_report(const LabeledSample& screen,
                              const std::vector<std::uint8_t>& alarms,
                              const std::vector<std::string>& labels) {
  const std::size_t K = labels.size();
  EvaluationReport report;
  report.labels = labels;
  report.n_k.assign(K, 0);
  report.alarms_k.assign(K, 0);
  report.n = static_cast<std::int64_t>(screen.size());
  report.has_outcomes = screen.has_outcomes();
  if (report.has_outcomes) report.cells.assign(K, ClassCells{});

  for (std::size_t i = 0; i < screen.size(); ++i) {
    const std::uint32_t k = screen.z[i];
    ++report.n_k[k];
    const bool alarm = alarms[i] != 0;
    if (alarm) {
      ++report.alarms_k[k];
      ++report.alarms;
    }
    if (report.has_outcomes) {
      const bool positive = screen.y[i] != 0;
      ClassCells& c = report.cells[k];
      if (alarm && positive) ++c.tp;
      if (alarm && !positive) ++c.fp;
      if (!alarm && positive) ++c.fn;
      if (!alarm && !positive) ++c.tn;
    }
  }

  report.alarm_rate_k.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    report.alarm_rate_k[k] =
        report.n_k[k] > 0 ? static_cast<double>(report.alarms_k[k]) /
                                static_cast<double>(report.n_k[k])
                          : 0.0;
  }
  report.alarm_rate = report.n > 0 ? static_cast<double>(report.alarms) /
                                         static_cast<double>(report.n)
                                   : 0.0;

  if (report.has_outcomes) {
    report.tpr_k.resize(K);
    report.tnr_k.resize(K);
    std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const ClassCells& c = report.cells[k];
      tp += c.tp;
      fn += c.fn;
      fp += c.fp;
      tn += c.tn;
      if (c.tp + c.fn > 0) {
        report.tpr_k[k] = static_cast<double>(c.tp) /
                          static_cast<double>(c.tp + c.fn);
      }
      if (c.tn + c.fp > 0) {
        report.tnr_k[k] = static_cast<double>(c.tn) /
                          static_cast<double>(c.tn + c.fp);
      }
    }
    if (tp + fn > 0) {
      report.pooled_tpr =
          static_cast<double>(tp) / static_cast<double>(tp + fn);
      report.overall_tpr = static_cast<double>(report.alarms) /
                           static_cast<double>(tp + fn);
    }
    if (tn + fp > 0) {
      report.pooled_tnr =
          static_cast<double>(tn) / static_cast<double>(tn + fp);
      report.overall_tnr = 1.0 - static_cast<double>(report.alarms) /
                                     static_cast<double>(tn + fp);
    }
  }
  return report;
}

}  // namespace

EvaluationReport evaluate_thresholds(const LabeledSample& screen,
                                     const std::vector<double>& raw,
                                     const std::vector<std::string>& labels) {
  if (screen.labels != labels) {
    throw ValidationError("evaluate: screening sample classes differ from the "
                          "rule's classes");
  }
  return build_report(screen, apply_thresholds(screen, raw), labels);
}

EvaluationReport evaluate_rule(const LabeledSample& screen,
                               const EstimatedRule& rule) {
  return evaluate_thresholds(screen, rule.raw, rule.dist.labels);
}

}  // namespace classthresh
