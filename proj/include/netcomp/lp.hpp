#pragma once

#include "netcomp/network.hpp"

namespace netcomp {

/// min cᵀx  s.t.  A x = b,  lower <= x <= upper. Bounds may be ±inf.
struct LinearProgram {
  Vector objective;
  Matrix equality_matrix;
  Vector equality_rhs;
  Vector lower;
  Vector upper;

  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double value = 0.0;
  int iterations = 0;
};

struct LpOptions {
  double tolerance = 1e-9;  // reduced-cost and feasibility tolerance
  int max_iterations = 200000;
};

/// Two-phase bounded-variable simplex with Bland's rule.
LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options = {});

std::string to_string(LpStatus status);

}  // namespace netcomp
