#pragma once

#include <cstdint>
#include <vector>

#include "classthresh/estimation.hpp"
#include "classthresh/sample.hpp"

namespace classthresh {

struct BootstrapConfig {
  std::size_t B = 1000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  int threads = 1;
  bool keep_replicates = false;
};

// Nonparametric pair bootstrap of the fitted score cutoffs. Replicates whose
// resample is inadmissible or degenerate are rejected and redrawn from a
// fresh substream; the run aborts when more than half of all attempted
// replicates were rejected.
struct BootstrapReport {
  std::size_t B = 0;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
  std::vector<double> mean;   // per class, over replicates
  std::vector<double> se;     // per class, B-1 divisor
  std::vector<double> ci_lo;  // percentile interval, left-continuous quantile
  std::vector<double> ci_hi;
  std::size_t rejected = 0;
  std::vector<std::vector<double>> replicates;  // B x K when kept
};

BootstrapReport bootstrap_thresholds(const LabeledSample& sample,
                                     const RuleSpec& spec,
                                     StandardizationMode mode, double tau,
                                     double alpha,
                                     const BootstrapConfig& config);

struct ScreeningSimConfig {
  std::size_t N = 10000;
  std::size_t B = 1000;
  double bw_factor = 1.59;
  std::uint64_t seed = 0;
  int threads = 1;
  // Use the marginal scale for the smoothing noise even in conditional mode.
  bool marginal_bandwidth = false;
};

// Smoothed screening simulation: per replicate, (1) a size-n bootstrap
// refit yields raw thresholds, (2) a size-N smoothed bootstrap sample from
// the original data (Gaussian noise, sd = bw_factor * s * N^{-1/5}) is
// screened against them, (3) alarm fractions are recorded; fractions are
// averaged over replicates.
struct ScreeningSimReport {
  std::size_t N = 0;
  std::size_t B = 0;
  double bw_factor = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> class_rates;  // mean per-class alarm fraction
  double marginal_rate = 0.0;       // mean total alarms / N
  std::vector<double> noise_sd;     // smoothing sd actually used, per class
  std::size_t rejected = 0;
};

ScreeningSimReport smoothed_screening_sim(const LabeledSample& sample,
                                          const RuleSpec& spec,
                                          StandardizationMode mode, double tau,
                                          double alpha,
                                          const ScreeningSimConfig& config);

}  // namespace classthresh
