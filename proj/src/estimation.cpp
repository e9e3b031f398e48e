#include "classthresh/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "classthresh/empirical.hpp"
#include "classthresh/errors.hpp"
#include "classthresh/kernels.hpp"

namespace classthresh {

void LabeledSample::validate() const {
  if (x.size() != z.size()) {
    throw ValidationError("sample: x/z size mismatch");
  }
  if (!y.empty() && y.size() != x.size()) {
    throw ValidationError("sample: y size mismatch");
  }
  if (labels.empty()) throw ValidationError("sample: no class labels");
  for (auto zi : z) {
    if (zi >= labels.size()) {
      throw ValidationError("sample: class index out of range");
    }
  }
  for (double v : x) {
    if (std::isnan(v)) throw ValidationError("sample: NaN measurement");
  }
}

ClassDistribution relative_frequencies(const LabeledSample& sample) {
  sample.validate();
  if (sample.size() == 0) throw DataError("relative_frequencies: empty sample");
  ClassDistribution dist;
  dist.labels = sample.labels;
  dist.counts.assign(sample.labels.size(), 0);
  for (auto zi : sample.z) ++dist.counts[zi];
  dist.probs.resize(dist.counts.size());
  const double n = static_cast<double>(sample.size());
  for (std::size_t k = 0; k < dist.counts.size(); ++k) {
    dist.probs[k] = static_cast<double>(dist.counts[k]) / n;
  }
  return dist;
}

namespace {

struct Moments {
  double mu;
  double sigma;
};

Moments ml_moments(const double* x, std::size_t n, double tau,
                   const std::string& what) {
  if (n == 0) throw DataError("standardization: " + what + " has no data");
  const auto& ops = kernels::active_ops();
  const bool truncate = std::isfinite(tau);
  const double dn = static_cast<double>(n);
  const double mu = (truncate ? ops.sum_truncated(x, n, tau) : ops.sum(x, n)) / dn;
  const double ss = truncate ? ops.sum_sq_dev_truncated(x, n, mu, tau)
                             : ops.sum_sq_dev(x, n, mu);
  const double sigma = std::sqrt(ss / dn);
  if (!(sigma > 0.0)) {
    throw DataError("standardization: zero scale in " + what +
                    " (constant or single observation)");
  }
  return {mu, sigma};
}

}  // namespace

StandardizationModel fit_standardization(const LabeledSample& sample,
                                         StandardizationMode mode, double tau) {
  sample.validate();
  if (sample.size() == 0) throw DataError("standardization: empty sample");
  if (std::isnan(tau) || tau <= 0.0) {
    throw ValidationError("standardization: tau must be positive (inf = no "
                          "truncation)");
  }
  StandardizationModel model;
  model.mode = mode;
  model.tau = tau;
  if (mode == StandardizationMode::kMarginal) {
    const Moments m = ml_moments(sample.x.data(), sample.size(), tau, "sample");
    model.mu = {m.mu};
    model.sigma = {m.sigma};
    return model;
  }
  const std::size_t K = sample.labels.size();
  model.mu.resize(K);
  model.sigma.resize(K);
  std::vector<std::vector<double>> byclass(K);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    byclass[sample.z[i]].push_back(sample.x[i]);
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (byclass[k].empty()) {
      throw DataError("standardization: class '" + sample.labels[k] +
                      "' has no observations");
    }
    const Moments m = ml_moments(byclass[k].data(), byclass[k].size(), tau,
                                 "class '" + sample.labels[k] + "'");
    model.mu[k] = m.mu;
    model.sigma[k] = m.sigma;
  }
  return model;
}

std::vector<double> residuals(const LabeledSample& sample,
                              const StandardizationModel& model) {
  const auto& ops = kernels::active_ops();
  std::vector<double> out(sample.size());
  if (model.mode == StandardizationMode::kMarginal) {
    ops.standardize(sample.x.data(), sample.size(), model.mu[0],
                    1.0 / model.sigma[0], out.data());
    return out;
  }
  // Gather per class, transform with the class scale, scatter back.
  const std::size_t K = sample.labels.size();
  std::vector<std::vector<double>> vals(K);
  std::vector<std::vector<std::size_t>> idx(K);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    vals[sample.z[i]].push_back(sample.x[i]);
    idx[sample.z[i]].push_back(i);
  }
  std::vector<double> buf;
  for (std::size_t k = 0; k < K; ++k) {
    buf.resize(vals[k].size());
    ops.standardize(vals[k].data(), vals[k].size(), model.mu[k],
                    1.0 / model.sigma[k], buf.data());
    for (std::size_t j = 0; j < buf.size(); ++j) out[idx[k][j]] = buf[j];
  }
  return out;
}

std::string rule_name(const RuleSpec& spec) {
  struct Visitor {
    std::string operator()(const ProportionalRule&) { return "proportional"; }
    std::string operator()(const GammaProportionalRule& r) {
      std::ostringstream s;
      s << "gamma-proportional(gamma=" << r.gamma << ")";
      return s.str();
    }
    std::string operator()(const ModifiedRule&) { return "modified"; }
    std::string operator()(const SubprobabilityRule&) {
      return "subprobability";
    }
    std::string operator()(const ConstantRule&) { return "constant"; }
    std::string operator()(const OptimalRule&) { return "optimal"; }
  };
  return std::visit(Visitor{}, spec);
}

double raw_threshold_from_score(double c, double mu, double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("raw threshold: sigma must be > 0");
  const double inv_sigma = 1.0 / sigma;
  const auto score = [&](double t) { return (t - mu) * inv_sigma; };
  if (std::isinf(c)) return c > 0 ? c : -std::numeric_limits<double>::infinity();
  double t = mu + sigma * c;
  if (std::isinf(t)) return t;
  const double inf = std::numeric_limits<double>::infinity();
  while (score(t) > c) t = std::nextafter(t, -inf);
  for (;;) {
    const double up = std::nextafter(t, inf);
    if (score(up) <= c) {
      t = up;
    } else {
      break;
    }
  }
  return t;
}

namespace {

ThresholdSet score_thresholds(const RuleSpec& spec, const ClassDistribution& p,
                              const EmpiricalDistribution& scores, double alpha,
                              std::optional<SubProbabilityVector>& g_out,
                              std::optional<OptimalFitInfo>& opt_out) {
  struct Visitor {
    const ClassDistribution& p;
    const EmpiricalDistribution& scores;
    double alpha;
    std::optional<SubProbabilityVector>& g_out;
    std::optional<OptimalFitInfo>& opt_out;

    ThresholdSet operator()(const ProportionalRule&) {
      g_out = gamma_proportional_mass(p, 1.0, alpha);
      return proportional_thresholds(p, alpha, scores);
    }
    ThresholdSet operator()(const GammaProportionalRule& r) {
      g_out = gamma_proportional_mass(p, r.gamma, alpha);
      return gamma_proportional_thresholds(p, r.gamma, alpha, scores);
    }
    ThresholdSet operator()(const ModifiedRule& r) {
      return modified_thresholds(p, r.params, alpha, scores);
    }
    ThresholdSet operator()(const SubprobabilityRule& r) {
      SubProbabilityVector g;
      g.g = r.g;
      g_out = g;
      return thresholds_from_subprobability(g, p, scores);
    }
    ThresholdSet operator()(const ConstantRule&) {
      SubProbabilityVector g;
      g.g.resize(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) {
        g.g[k] = (1.0 - alpha) * p.probs[k];
      }
      ThresholdSet out;
      out.alpha = alpha;
      out.c.assign(p.size(), scores.quantile(1.0 - alpha));
      g_out = g;
      return out;
    }
    ThresholdSet operator()(const OptimalRule& r) {
      r.alt.validate(p.size());
      std::vector<double> c_star =
          r.c_star.has_value()
              ? *r.c_star
              : c_opt_star(r.alt, r.alt.budgets(p.size()), scores);
      if (c_star.size() != p.size()) {
        throw ValidationError("optimal rule: c_star/class size mismatch");
      }
      LpInstance lp = build_lp(p, alpha, c_star, scores);
      SubProbabilityVector g = solve_minority_greedy(lp, p);
      OptimalFitInfo info;
      info.c_star = std::move(c_star);
      info.cap = lp.cap;
      info.objective = g.g[lp.minority];
      info.minority = lp.minority;
      opt_out = std::move(info);
      ThresholdSet out = thresholds_from_subprobability(g, p, scores);
      out.alpha = alpha;
      g_out = std::move(g);
      return out;
    }
  };
  return std::visit(Visitor{p, scores, alpha, g_out, opt_out}, spec);
}

}  // namespace

EstimatedRule estimate_rule(const LabeledSample& sample, const RuleSpec& spec,
                            StandardizationMode mode, double tau, double alpha) {
  if (std::isnan(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
  EstimatedRule rule;
  rule.name = rule_name(spec);
  rule.dist = relative_frequencies(sample);
  rule.model = fit_standardization(sample, mode, tau);
  const EmpiricalDistribution scores(residuals(sample, rule.model));
  rule.standardized =
      score_thresholds(spec, rule.dist, scores, alpha, rule.g, rule.optimal);
  rule.raw.resize(rule.dist.size());
  for (std::size_t k = 0; k < rule.dist.size(); ++k) {
    const auto ki = static_cast<std::uint32_t>(k);
    rule.raw[k] = raw_threshold_from_score(rule.standardized.c[k],
                                           rule.model.mu_for(ki),
                                           rule.model.sigma_for(ki));
  }
  return rule;
}

DichotomizeResult dichotomize_top_quantile(const std::vector<double>& values,
                                           double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ValidationError("dichotomize: q must lie in (0, 1)");
  }
  const EmpiricalDistribution dist{values};
  DichotomizeResult out;
  out.threshold = dist.quantile(q);
  out.high.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out.high[i] = values[i] > out.threshold ? 1 : 0;
    out.n_high += out.high[i];
  }
  return out;
}

std::vector<double> cusum_transform(const std::vector<double>& series,
                                    std::size_t h) {
  if (h < 1) throw ValidationError("cusum: window must be >= 1");
  if (h > series.size()) {
    throw ValidationError("cusum: window exceeds series length");
  }
  const std::size_t m = series.size() / h;
  const double scale = 1.0 / std::sqrt(static_cast<double>(h));
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = kernels::active_ops().sum(series.data() + i * h, h) * scale;
  }
  return out;
}

}  // namespace classthresh
