#include "classthresh/design.hpp"

#include <cmath>
#include <sstream>

#include "classthresh/errors.hpp"
#include "classthresh/simplex.hpp"

namespace classthresh {

namespace {
constexpr double kCapMargin = 1e-12;

void check_alpha(double alpha) {
  if (std::isnan(alpha) || alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("alpha must lie in [0, 1]");
  }
}
}  // namespace

void AlternativeSpec::validate(std::size_t K) const {
  if (delta.size() != K || sigma.size() != K) {
    throw ValidationError("alternative: delta/sigma must have one entry per "
                          "class");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw ValidationError("alternative: sigma_k must be > 0");
  }
  if (beta.has_value() && !(*beta > 0.0 && *beta < 1.0)) {
    throw ValidationError("alternative: beta must lie in (0, 1)");
  }
  if (beta_k.has_value()) {
    if (beta_k->size() != K) {
      throw ValidationError("alternative: beta_k must have one entry per "
                            "class");
    }
    for (double b : *beta_k) {
      if (!(b > 0.0 && b < 1.0)) {
        throw ValidationError("alternative: beta_k entries must lie in (0, 1)");
      }
    }
  }
}

std::vector<double> AlternativeSpec::budgets(std::size_t K) const {
  if (beta_k.has_value()) return *beta_k;
  if (beta.has_value()) return std::vector<double>(K, *beta);
  throw ValidationError("alternative: needs beta or beta_k");
}

std::vector<double> c_opt_star(const AlternativeSpec& alt,
                               const std::vector<double>& budgets,
                               const ScoreDistribution& scores) {
  const std::size_t K = alt.delta.size();
  if (budgets.size() != K) {
    throw ValidationError("c_opt_star: budget/class size mismatch");
  }
  alt.validate(K);
  std::vector<double> c(K);
  for (std::size_t k = 0; k < K; ++k) {
    c[k] = alt.delta[k] + alt.sigma[k] * scores.quantile(budgets[k]);
  }
  return c;
}

LpInstance build_lp(const ClassDistribution& dist, double alpha,
                    const std::vector<double>& c_star,
                    const ScoreDistribution& scores) {
  dist.validate();
  check_alpha(alpha);
  const std::size_t K = dist.size();
  if (c_star.size() != K) {
    throw ValidationError("build_lp: c_star/class size mismatch");
  }

  LpInstance lp;
  lp.alpha = alpha;
  lp.cap.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    double cap = dist.probs[k] * scores.cdf(c_star[k]);
    const double strict = dist.probs[k] * (1.0 - kCapMargin);
    if (cap >= strict) cap = strict;  // keep quantile arguments below 1
    lp.cap[k] = cap;
  }

  lp.minority = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (dist.probs[k] < dist.probs[lp.minority]) lp.minority = k;
  }

  lp.A.assign(K + 1, std::vector<double>(K, 0.0));
  lp.b.resize(K + 1);
  lp.b[0] = alpha - 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    lp.A[0][k] = -1.0;
    lp.A[k + 1][k] = 1.0;
    lp.b[k + 1] = lp.cap[k];
  }
  lp.d.assign(K, 0.0);
  lp.d[lp.minority] = 1.0;
  return lp;
}

namespace {

// Clamp a solver result into exact feasibility of the box constraints.
SubProbabilityVector clamp_solution(std::vector<double> g,
                                    const LpInstance& lp,
                                    const ClassDistribution& dist) {
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (g[k] < 0.0) {
      if (g[k] < -1e-9) {
        throw ValidationError("lp solution: negative mass beyond tolerance");
      }
      g[k] = 0.0;
    }
    if (g[k] > lp.cap[k]) {
      if (g[k] > lp.cap[k] + 1e-9) {
        throw ValidationError("lp solution: cap exceeded beyond tolerance");
      }
      g[k] = lp.cap[k];
    }
  }
  SubProbabilityVector out;
  out.g = std::move(g);
  out.validate(dist);
  return out;
}

void check_feasible(const LpInstance& lp) {
  double total = 0.0;
  for (double c : lp.cap) total += c;
  const double need = 1.0 - lp.alpha;
  if (total < need - 1e-12) {
    std::ostringstream msg;
    msg << "optimal design infeasible: per-class caps sum to " << total
        << " but the level constraint needs " << need << " (gap "
        << (need - total) << "); relax the miss budgets or raise alpha";
    throw InfeasibleError(msg.str());
  }
}

}  // namespace

SubProbabilityVector solve_minority_greedy(const LpInstance& lp,
                                           const ClassDistribution& dist) {
  check_feasible(lp);
  const std::size_t K = lp.cap.size();
  std::vector<double> g(lp.cap);
  double others = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k != lp.minority) others += lp.cap[k];
  }
  double need = (1.0 - lp.alpha) - others;
  if (need < 0.0) need = 0.0;
  if (need > lp.cap[lp.minority]) need = lp.cap[lp.minority];
  g[lp.minority] = need;
  return clamp_solution(std::move(g), lp, dist);
}

SubProbabilityVector solve_simplex_lp(const LpInstance& lp,
                                      const ClassDistribution& dist) {
  check_feasible(lp);
  LpSolution sol = solve_lp(lp.A, lp.b, lp.d);
  if (sol.status == LpStatus::kInfeasible) {
    throw InfeasibleError("optimal design infeasible (simplex phase 1)");
  }
  if (sol.status == LpStatus::kUnbounded) {
    // Box constraints bound every variable; this cannot happen.
    throw ValidationError("optimal design: simplex reported unbounded");
  }
  return clamp_solution(std::move(sol.x), lp, dist);
}

PowerReport predicted_power(const ThresholdSet& thresholds,
                            const AlternativeSpec& alt,
                            const ClassDistribution& dist,
                            const ScoreDistribution& scores) {
  dist.validate();
  const std::size_t K = dist.size();
  alt.validate(K);
  if (thresholds.c.size() != K) {
    throw ValidationError("predicted_power: threshold/class size mismatch");
  }
  PowerReport out;
  out.conditional.resize(K);
  out.marginal = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double z = (thresholds.c[k] - alt.delta[k]) / alt.sigma[k];
    out.conditional[k] = 1.0 - scores.cdf(z);
    out.marginal += dist.probs[k] * out.conditional[k];
  }
  return out;
}

namespace {

EnvelopeCheck make_envelope(const ThresholdSet& thresholds,
                            const AlternativeSpec& alt,
                            const ClassDistribution& dist,
                            const std::vector<double>& budgets,
                            const ScoreDistribution& scores) {
  EnvelopeCheck check;
  check.c_star = c_opt_star(alt, budgets, scores);
  const std::size_t K = dist.size();
  check.cap.resize(K);
  check.ok.resize(K);
  check.all_ok = true;
  for (std::size_t k = 0; k < K; ++k) {
    check.cap[k] = dist.probs[k] * scores.cdf(check.c_star[k]);
    check.ok[k] = thresholds.c[k] <= check.c_star[k];
    if (!check.ok[k]) check.all_ok = false;
  }
  return check;
}

}  // namespace

Theorem1Report verify_theorem1(const ThresholdSet& thresholds,
                               const AlternativeSpec& alt,
                               const ClassDistribution& dist, double alpha,
                               const ScoreDistribution& scores) {
  dist.validate();
  check_alpha(alpha);
  const std::size_t K = dist.size();
  alt.validate(K);
  if (thresholds.c.size() != K) {
    throw ValidationError("verify_theorem1: threshold/class size mismatch");
  }

  Theorem1Report report;
  report.alpha = alpha;
  report.false_alarm = false_alarm_rate(thresholds, dist, scores);
  report.level_ok = report.false_alarm <= alpha;
  report.c = thresholds.c;
  report.g.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    report.g[k] = dist.probs[k] * scores.cdf(thresholds.c[k]);
  }

  bool envelopes_ok = true;
  if (alt.beta.has_value()) {
    report.shared = make_envelope(thresholds, alt, dist,
                                  std::vector<double>(K, *alt.beta), scores);
    envelopes_ok = envelopes_ok && report.shared->all_ok;
  }
  if (alt.beta_k.has_value()) {
    report.per_class = make_envelope(thresholds, alt, dist, *alt.beta_k, scores);
    envelopes_ok = envelopes_ok && report.per_class->all_ok;
  }
  if (alt.beta.has_value() && alt.beta_k.has_value()) {
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += dist.probs[k] * (*alt.beta_k)[k];
    report.budget_sum = s;
    report.budget_ok = s <= *alt.beta;
  }
  if (alt.beta.has_value() || alt.beta_k.has_value()) {
    const std::vector<double> budgets = alt.budgets(K);
    double s = 0.0;
    for (std::size_t k = 0; k < K; ++k) s += dist.probs[k] * budgets[k];
    report.power_floor = 1.0 - s;
  }

  report.all_ok = report.level_ok && envelopes_ok &&
                  (!report.budget_ok.has_value() || *report.budget_ok);
  return report;
}

}  // namespace classthresh
