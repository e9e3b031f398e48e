#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace classthresh {

// Discrete covariate distribution over class labels. probs sum to 1 within
// 1e-12; counts are populated when the distribution was estimated from data.
struct ClassDistribution {
  std::vector<std::string> labels;
  std::vector<double> probs;
  std::vector<std::int64_t> counts;  // empty for analytic distributions

  std::size_t size() const { return probs.size(); }
  void validate() const;  // throws ValidationError
};

// Per-class alarm mass under the null: g_k in [0, p_k), g_k = 0 where p_k = 0.
// The implied global false-alarm rate of the induced rule is 1 - sum(g).
struct SubProbabilityVector {
  std::vector<double> g;

  double sum() const;
  double implied_alpha() const { return 1.0 - sum(); }
  void validate(const ClassDistribution& dist) const;  // throws ValidationError
};

}  // namespace classthresh
