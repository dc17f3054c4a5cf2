#pragma once

#include <cstddef>

#include "alm/problem.hpp"

namespace alm {

struct OracleOptions {
  /// Adds M >= min(S) - 10 (max alpha + range(S)) at every node, so that
  /// degenerate tolerances give a finite (box-limited) answer.
  bool box_guard = false;
  std::size_t variable_cap = 2000;
  double barrier_gap = 1e-11;
};

/// Direct convex program over one wealth variable per node. Piecewise-linear
/// programs (call loss, or the CVaR style) go to the simplex; smooth losses go
/// to the barrier method.
///
/// Throws Infeasible, Unbounded, SolverFailure, or InvalidInput when the
/// variable cap is exceeded.
SolveResult solve_oracle(const HedgeProblem& problem, const OracleOptions& options = {});

struct OrderingReport {
  double eu = 0.0;
  double tc = 0.0;
  double lb = 0.0;
  bool ordered = true;
  double worst = 0.0;  // max(eu - tc, tc - lb)
};

/// Solves the problem under the three expected-loss styles and checks
/// V_EU <= V_TC <= V_LB within `tol`. Throws SolverFailure on violation when
/// `strict` is set.
OrderingReport verify_inclusion_ordering(const HedgeProblem& problem, double tol = 1e-7,
                                         bool strict = true, const OracleOptions& options = {});

}  // namespace alm
