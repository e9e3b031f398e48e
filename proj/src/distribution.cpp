#include "classthresh/distribution.hpp"

#include <cmath>
#include <set>

#include "classthresh/errors.hpp"

namespace classthresh {

void ClassDistribution::validate() const {
  if (probs.empty()) throw ValidationError("class distribution: no classes");
  if (labels.size() != probs.size()) {
    throw ValidationError("class distribution: labels/probs size mismatch");
  }
  if (!counts.empty() && counts.size() != probs.size()) {
    throw ValidationError("class distribution: counts size mismatch");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ValidationError("class distribution: empty label");
    if (!seen.insert(l).second) {
      throw ValidationError("class distribution: duplicate label '" + l + "'");
    }
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError("class distribution: probability outside [0, 1]");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw ValidationError("class distribution: probabilities sum to " +
                          std::to_string(total) + ", expected 1");
  }
}

double SubProbabilityVector::sum() const {
  double s = 0.0;
  for (double v : g) s += v;
  return s;
}

void SubProbabilityVector::validate(const ClassDistribution& dist) const {
  if (g.size() != dist.size()) {
    throw ValidationError("subprobability vector: size mismatch with classes");
  }
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double pk = dist.probs[k];
    if (!(g[k] >= 0.0)) {
      throw ValidationError("subprobability vector: negative mass at class " +
                            dist.labels[k]);
    }
    if (pk == 0.0) {
      if (g[k] != 0.0) {
        throw ValidationError(
            "subprobability vector: positive mass on zero-probability class " +
            dist.labels[k]);
      }
    } else if (!(g[k] < pk)) {
      throw ValidationError("subprobability vector: mass must stay below p_k "
                            "at class " +
                            dist.labels[k]);
    }
  }
}

}  // namespace classthresh
