#pragma once

#include <vector>

namespace classthresh {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  int iterations = 0;
};

// Minimize c.x subject to A x <= b, x >= 0. Dense two-phase simplex with
// Bland's rule (anti-cycling). Intended for small instances.
LpSolution solve_lp(const std::vector<std::vector<double>>& A,
                    const std::vector<double>& b, const std::vector<double>& c);

}  // namespace classthresh
