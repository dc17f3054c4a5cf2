#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace alm::lp {

enum class Sense { LessEqual, GreaterEqual, Equal };

struct Term {
  std::size_t var;
  double coef;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::LessEqual;
  double rhs = 0.0;
};

/// minimize c^T x subject to the rows and per-variable bounds.
struct LinearProgram {
  std::vector<double> cost;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<Row> rows;

  std::size_t add_variable(double c, double lo = -std::numeric_limits<double>::infinity(),
                           double hi = std::numeric_limits<double>::infinity());
  std::size_t add_row(std::vector<Term> terms, Sense sense, double rhs);
  std::size_t variables() const { return cost.size(); }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(Status s);

struct Options {
  double pivot_tolerance = 1e-9;
  double optimality_tolerance = 1e-11;
  double feasibility_tolerance = 1e-9;
  int max_iterations = 0;  // 0: 50 * (rows + columns)
};

struct Solution {
  Status status = Status::IterationLimit;
  double objective = 0.0;
  std::vector<double> x;
  std::vector<double> duals;  // one per row, Lagrange multiplier of the row
  double duality_gap = 0.0;
  double dual_infeasibility = 0.0;
  double primal_infeasibility = 0.0;
  int iterations = 0;
};

/// Dense two-phase primal simplex. Basic solutions are refined by a direct
/// solve with the final basis, and duals come from the same basis.
Solution solve(const LinearProgram& program, const Options& options = {});

}  // namespace alm::lp
