#pragma once

#include <vector>

#include "polylearn/core.hpp"

namespace polylearn {

// maximize c.x  subject to  A x <= b,  x_j >= 0 unless free_vars[j].
struct LinearProgram {
  Matrix A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  std::vector<bool> free_vars;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

// Dense two-phase simplex with Bland's rule. Intended for small problems.
LpResult solve_lp(const LinearProgram& lp);

}  // namespace polylearn
