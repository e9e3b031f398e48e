#include "classthresh/resampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "classthresh/empirical.hpp"
#include "classthresh/errors.hpp"
#include "classthresh/kernels.hpp"
#include "classthresh/rng.hpp"

namespace classthresh {

namespace {

constexpr int kMaxAttempts = 64;

// Stream ids: phase in the top byte keeps bootstrap draws and smoothing noise
// on disjoint streams; attempts get fresh substreams so rejected replicates
// are redrawn deterministically.
std::uint64_t stream_id(unsigned phase, std::size_t replicate, int attempt) {
  return (static_cast<std::uint64_t>(phase) << 56) |
         (static_cast<std::uint64_t>(replicate) << 8) |
         static_cast<std::uint64_t>(attempt);
}

LabeledSample resample_pairs(const LabeledSample& base, PhiloxRng& rng) {
  LabeledSample out;
  out.labels = base.labels;
  const std::size_t n = base.size();
  out.x.resize(n);
  out.z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = rng.next_index(n);
    out.x[i] = base.x[j];
    out.z[i] = base.z[j];
  }
  return out;
}

// One accepted replicate fit, redrawing on admissibility/data failures.
// Returns the number of rejected attempts before acceptance.
std::size_t fit_replicate(const LabeledSample& base, const RuleSpec& spec,
                          StandardizationMode mode, double tau, double alpha,
                          std::uint64_t seed, std::size_t replicate,
                          EstimatedRule& out) {
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PhiloxRng rng(seed, stream_id(0, replicate, attempt));
    LabeledSample draw = resample_pairs(base, rng);
    try {
      out = estimate_rule(draw, spec, mode, tau, alpha);
      return static_cast<std::size_t>(attempt);
    } catch (const InfeasibleError&) {
    } catch (const DataError&) {
    }
  }
  std::ostringstream msg;
  msg << "bootstrap: replicate " << replicate << " rejected " << kMaxAttempts
      << " times in a row (resamples keep violating admissibility); the rule "
         "is too fragile for this data";
  throw InfeasibleError(msg.str());
}

void check_rejection_rate(std::size_t rejected, std::size_t accepted) {
  const std::size_t attempts = rejected + accepted;
  if (rejected * 2 > attempts) {
    std::ostringstream msg;
    msg << "bootstrap aborted: " << rejected << " of " << attempts
        << " attempted replicates were inadmissible (> 50%)";
    throw InfeasibleError(msg.str());
  }
}

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

BootstrapReport bootstrap_thresholds(const LabeledSample& sample,
                                     const RuleSpec& spec,
                                     StandardizationMode mode, double tau,
                                     double alpha,
                                     const BootstrapConfig& config) {
  if (config.B < 2) throw ValidationError("bootstrap: B must be >= 2");
  if (!(config.ci_level > 0.0 && config.ci_level < 1.0)) {
    throw ValidationError("bootstrap: ci_level must lie in (0, 1)");
  }
  // The base fit must exist; its failure is the caller's error, not a
  // replicate rejection.
  const EstimatedRule base = estimate_rule(sample, spec, mode, tau, alpha);
  const std::size_t K = base.dist.size();

  std::vector<std::vector<double>> reps(config.B, std::vector<double>(K));
  std::atomic<std::size_t> rejected{0};
  parallel_for(config.B, config.threads, [&](std::size_t r) {
    EstimatedRule fit;
    rejected += fit_replicate(sample, spec, mode, tau, alpha, config.seed, r,
                              fit);
    reps[r] = fit.standardized.c;
  });
  check_rejection_rate(rejected.load(), config.B);

  BootstrapReport report;
  report.B = config.B;
  report.seed = config.seed;
  report.ci_level = config.ci_level;
  report.rejected = rejected.load();
  report.mean.resize(K);
  report.se.resize(K);
  report.ci_lo.resize(K);
  report.ci_hi.resize(K);
  std::vector<double> column(config.B);
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t r = 0; r < config.B; ++r) column[r] = reps[r][k];
    const double mean =
        kernels::active_ops().sum(column.data(), column.size()) /
        static_cast<double>(config.B);
    const double ss = kernels::active_ops().sum_sq_dev(column.data(),
                                                       column.size(), mean);
    report.mean[k] = mean;
    report.se[k] = std::sqrt(ss / static_cast<double>(config.B - 1));
    const EmpiricalDistribution dist(column);
    const double lo_q = (1.0 - config.ci_level) / 2.0;
    report.ci_lo[k] = dist.quantile(lo_q);
    report.ci_hi[k] = dist.quantile(1.0 - lo_q);
  }
  if (config.keep_replicates) report.replicates = std::move(reps);
  return report;
}

ScreeningSimReport smoothed_screening_sim(const LabeledSample& sample,
                                          const RuleSpec& spec,
                                          StandardizationMode mode, double tau,
                                          double alpha,
                                          const ScreeningSimConfig& config) {
  if (config.B < 1) throw ValidationError("screening sim: B must be >= 1");
  if (config.N < 1) throw ValidationError("screening sim: N must be >= 1");
  if (!(config.bw_factor > 0.0)) {
    throw ValidationError("screening sim: bw_factor must be > 0");
  }
  const EstimatedRule base = estimate_rule(sample, spec, mode, tau, alpha);
  const std::size_t K = base.dist.size();

  // Smoothing scale from the base standardization: per class in conditional
  // mode unless the marginal variant is requested.
  const bool per_class_bw = mode == StandardizationMode::kConditional &&
                            !config.marginal_bandwidth;
  const double n_factor =
      std::pow(static_cast<double>(config.N), -0.2) * config.bw_factor;
  std::vector<double> noise_sd(K);
  StandardizationModel bw_model = base.model;
  if (!per_class_bw && mode == StandardizationMode::kConditional) {
    bw_model = fit_standardization(sample, StandardizationMode::kMarginal, tau);
  }
  for (std::size_t k = 0; k < K; ++k) {
    const double s = per_class_bw ? base.model.sigma[k] : bw_model.sigma[0];
    noise_sd[k] = s * n_factor;
  }

  struct ReplicateStats {
    std::vector<std::int64_t> draws, alarms;
    std::size_t rejected = 0;
  };
  std::vector<ReplicateStats> stats(config.B);

  parallel_for(config.B, config.threads, [&](std::size_t r) {
    EstimatedRule fit;
    stats[r].rejected = fit_replicate(sample, spec, mode, tau, alpha,
                                      config.seed, r, fit);

    PhiloxRng rng(config.seed, stream_id(1, r, 0));
    const std::size_t n = sample.size();
    std::vector<std::vector<double>> screened(K);
    for (std::size_t i = 0; i < config.N; ++i) {
      const std::size_t j = rng.next_index(n);
      const std::uint32_t zk = sample.z[j];
      screened[zk].push_back(sample.x[j] + rng.next_normal() * noise_sd[zk]);
    }
    stats[r].draws.resize(K);
    stats[r].alarms.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
      stats[r].draws[k] = static_cast<std::int64_t>(screened[k].size());
      stats[r].alarms[k] = static_cast<std::int64_t>(
          kernels::active_ops().count_greater(screened[k].data(),
                                              screened[k].size(), fit.raw[k]));
    }
  });

  ScreeningSimReport report;
  report.N = config.N;
  report.B = config.B;
  report.bw_factor = config.bw_factor;
  report.seed = config.seed;
  report.noise_sd = noise_sd;
  report.class_rates.assign(K, 0.0);
  std::vector<std::size_t> valid(K, 0);
  double marginal_sum = 0.0;
  for (std::size_t r = 0; r < config.B; ++r) {
    report.rejected += stats[r].rejected;
    std::int64_t total = 0;
    for (std::size_t k = 0; k < K; ++k) {
      total += stats[r].alarms[k];
      if (stats[r].draws[k] > 0) {
        report.class_rates[k] += static_cast<double>(stats[r].alarms[k]) /
                                 static_cast<double>(stats[r].draws[k]);
        ++valid[k];
      }
    }
    marginal_sum +=
        static_cast<double>(total) / static_cast<double>(config.N);
  }
  check_rejection_rate(report.rejected, config.B);
  for (std::size_t k = 0; k < K; ++k) {
    if (valid[k] == 0) {
      throw DataError("screening sim: class '" + sample.labels[k] +
                      "' was never drawn; raise N");
    }
    report.class_rates[k] /= static_cast<double>(valid[k]);
  }
  report.marginal_rate = marginal_sum / static_cast<double>(config.B);
  return report;
}

}  // namespace classthresh
