#pragma once

#include <functional>
#include <string>
#include <vector>

#include "alm/linear_program.hpp"

namespace alm::convex {

/// Scalar convex function with first and second derivatives.
struct Scalar {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

struct SmoothTerm {
  std::size_t var;
  double weight;  // must be >= 0 to keep the constraint convex
  double shift;   // term is weight * phi(x[var] - shift)
  const Scalar* own = nullptr;  // overrides the constraint's phi
};

/// sum_t weight_t phi(x_t - shift_t) + linear . x <= rhs
struct SmoothConstraint {
  std::vector<SmoothTerm> terms;
  std::vector<lp::Term> linear;
  double rhs = 0.0;
  const Scalar* phi = nullptr;  // shared per program, owned by the caller
};

/// minimize c . x subject to linear rows a . x <= b and smooth constraints.
struct ConvexProgram {
  std::vector<double> cost;
  std::vector<lp::Row> rows;  // only LessEqual rows are accepted
  std::vector<SmoothConstraint> smooth;
};

struct BarrierOptions {
  double gap_tolerance = 1e-11;  // absolute, on the barrier duality-gap bound
  double t_growth = 20.0;
  int max_newton = 200;
  double unbounded_threshold = -1e12;
};

enum class BarrierStatus { Optimal, Unbounded, NotStrictlyFeasible, Stalled };

std::string to_string(BarrierStatus s);

struct BarrierResult {
  BarrierStatus status = BarrierStatus::Stalled;
  std::vector<double> x;
  double objective = 0.0;
  double gap_bound = 0.0;
  int newton_steps = 0;
  std::vector<double> row_multipliers;
  std::vector<double> smooth_multipliers;
};

/// Log-barrier path following with damped Newton steps. `start` must be
/// strictly feasible.
BarrierResult minimize(const ConvexProgram& program, std::vector<double> start,
                       const BarrierOptions& options = {});

/// Largest constraint value (positive means violated).
double max_violation(const ConvexProgram& program, const std::vector<double>& x);

}  // namespace alm::convex
