#include "alm/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "alm/barrier.hpp"
#include "alm/errors.hpp"
#include "alm/linear_program.hpp"

namespace alm {

namespace {

using lp::Sense;
using lp::Term;

double guard_level(const HedgeProblem& p) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (NodeIndex i = 0; i < p.tree.size(); ++i) {
    lo = std::min(lo, p.benchmark[i]);
    hi = std::max(hi, p.benchmark[i]);
  }
  const double amax = *std::max_element(p.alphas.begin(), p.alphas.end());
  return lo - 10.0 * (std::max(amax, 0.0) + (hi - lo));
}

std::size_t variable_count(const HedgeProblem& p, bool linear) {
  const std::size_t nodes = p.tree.size();
  const std::size_t leaves = p.tree.leaves().size();
  std::size_t v = nodes;
  if (linear) v += nodes - 1;
  if (p.style == Style::LB) v += leaves;
  if (p.style == Style::CVAR) v += static_cast<std::size_t>(p.dates());
  return v;
}

void check_cap(const HedgeProblem& p, bool linear, const OracleOptions& o) {
  const std::size_t v = variable_count(p, linear);
  if (v > o.variable_cap)
    throw InvalidInput("oracle variable cap exceeded: " + std::to_string(v) + " > " +
                       std::to_string(o.variable_cap));
}

SolveResult finish(const HedgeProblem& p, const std::vector<double>& x, const std::string& solver) {
  SolveResult r;
  r.style = p.style;
  r.solver = solver;
  r.wealth = AdaptedProcess(p.tree, 0, p.dates());
  for (NodeIndex i = 0; i < p.tree.size(); ++i) r.wealth[i] = x[i];
  r.v0 = r.wealth[p.tree.root()];
  FeasibilityReport fr = check_feasibility(p, r.wealth, 1e-8);
  r.diagnostics["max_violation"] = fr.max_violation;
  if (!fr.feasible)
    r.notes.push_back("post-hoc feasibility re-check failed: " + fr.failures.front());
  return r;
}

SolveResult solve_linear(const HedgeProblem& p, const OracleOptions& o) {
  const ScenarioTree& t = p.tree;
  const int n = p.dates();
  lp::LinearProgram prog;
  const double lb = o.box_guard ? guard_level(p) : -std::numeric_limits<double>::infinity();
  for (NodeIndex i = 0; i < t.size(); ++i) prog.add_variable(i == t.root() ? 1.0 : 0.0, lb);

  for (NodeIndex i = 0; i < t.size(); ++i) {
    if (t.is_leaf(i)) continue;
    std::vector<Term> row{{i, -1.0}};
    for (NodeIndex c : t.children(i)) row.push_back({c, t.transition(c, Measure::Q)});
    prog.add_row(std::move(row), Sense::LessEqual, 0.0);
  }

  std::vector<std::size_t> z(static_cast<std::size_t>(n) + 1, 0);
  if (p.style == Style::CVAR)
    for (int k = 1; k <= n; ++k) z[static_cast<std::size_t>(k)] = prog.add_variable(0.0, 0.0);

  // Shortfall s_i >= S_i - M_i (- z_k for CVaR), s_i >= 0.
  std::vector<std::size_t> s(t.size(), 0);
  for (NodeIndex i = 1; i < t.size(); ++i) {
    s[i] = prog.add_variable(0.0, 0.0);
    std::vector<Term> row{{s[i], 1.0}, {i, 1.0}};
    if (p.style == Style::CVAR) row.push_back({z[static_cast<std::size_t>(t.date(i))], 1.0});
    prog.add_row(std::move(row), Sense::GreaterEqual, p.benchmark[i]);
  }

  std::vector<std::size_t> tc_rows(t.size(), SIZE_MAX);
  switch (p.style) {
    case Style::EU:
      for (int k = 1; k <= n; ++k) {
        std::vector<Term> row;
        for (NodeIndex i : t.nodes_at(k)) row.push_back({s[i], t.probability(i, Measure::P)});
        prog.add_row(std::move(row), Sense::LessEqual, p.alpha(k));
      }
      break;
    case Style::TC:
      for (int k = 1; k <= n; ++k)
        for (NodeIndex i : t.nodes_at(k - 1)) {
          std::vector<Term> row;
          for (NodeIndex c : t.children(i)) row.push_back({s[c], t.transition(c, Measure::P)});
          tc_rows[i] = prog.add_row(std::move(row), Sense::LessEqual, p.alpha(k));
        }
      break;
    case Style::LB: {
      std::vector<Term> total;
      for (NodeIndex leaf : t.leaves()) {
        const std::size_t e = prog.add_variable(0.0);
        total.push_back({e, t.probability(leaf, Measure::P)});
        for (NodeIndex i = leaf; t.date(i) >= 1; i = *t.parent(i))
          prog.add_row({{e, 1.0}, {s[i], -1.0}}, Sense::GreaterEqual, -p.alpha(t.date(i)));
      }
      prog.add_row(std::move(total), Sense::LessEqual, 0.0);
      break;
    }
    case Style::CVAR: {
      const double scale = 1.0 / (1.0 - p.cvar_level);
      for (int k = 1; k <= n; ++k) {
        std::vector<Term> row{{z[static_cast<std::size_t>(k)], 1.0}};
        for (NodeIndex i : t.nodes_at(k)) row.push_back({s[i], scale * t.probability(i, Measure::P)});
        prog.add_row(std::move(row), Sense::LessEqual, p.alpha(k));
      }
      break;
    }
  }

  lp::Solution sol = lp::solve(prog);
  if (sol.status == lp::Status::Infeasible)
    throw Infeasible("constraint set is empty: tolerances below the attainable loss");
  if (sol.status == lp::Status::Unbounded)
    throw Unbounded("objective unbounded below: constraints do not bound the wealth");
  if (sol.status != lp::Status::Optimal) throw SolverFailure("simplex: " + lp::to_string(sol.status));

  SolveResult r = finish(p, sol.x, "oracle-simplex");
  r.diagnostics["duality_gap"] = sol.duality_gap;
  r.diagnostics["dual_infeasibility"] = sol.dual_infeasibility;
  r.diagnostics["primal_infeasibility"] = sol.primal_infeasibility;
  r.diagnostics["iterations"] = sol.iterations;
  r.diagnostics["variables"] = static_cast<double>(prog.variables());
  if (p.style == Style::TC) {
    r.multipliers = AdaptedProcess(t, 0, n - 1);
    for (NodeIndex i = 0; i < t.size(); ++i)
      if (tc_rows[i] != SIZE_MAX) r.multipliers[i] = sol.duals[tc_rows[i]];
  }
  if (o.box_guard) r.notes.push_back("box guard M >= " + std::to_string(lb) + " applied");
  return r;
}

SolveResult solve_smooth(const HedgeProblem& p, const OracleOptions& o) {
  const ScenarioTree& t = p.tree;
  const int n = p.dates();
  const LossFunction& l = p.loss;
  if (!l.has_derivative() || !l.has_second_derivative())
    throw PreconditionError("oracle: loss '" + l.name() +
                            "' needs first and second derivatives for the barrier method");
  const double amin = *std::min_element(p.alphas.begin(), p.alphas.end());
  if (!(amin > l.inf_limit()))
    throw Infeasible("constraint set is empty: a tolerance does not exceed the loss infimum");

  convex::Scalar phi{[&l](double x) { return l(x); }, [&l](double x) { return l.derivative(x); },
                     [&l](double x) { return l.second_derivative(x); }};

  convex::ConvexProgram prog;
  for (NodeIndex i = 0; i < t.size(); ++i) prog.cost.push_back(i == t.root() ? 1.0 : 0.0);

  for (NodeIndex i = 0; i < t.size(); ++i) {
    if (t.is_leaf(i)) continue;
    std::vector<Term> row{{i, -1.0}};
    for (NodeIndex c : t.children(i)) row.push_back({c, t.transition(c, Measure::Q)});
    prog.rows.push_back({std::move(row), Sense::LessEqual, 0.0});
  }
  const double guard = guard_level(p);
  if (o.box_guard)
    for (NodeIndex i = 0; i < t.size(); ++i) prog.rows.push_back({{{i, -1.0}}, Sense::LessEqual, -guard});

  std::vector<std::size_t> tc_index(t.size(), SIZE_MAX);
  switch (p.style) {
    case Style::EU:
      for (int k = 1; k <= n; ++k) {
        convex::SmoothConstraint g;
        g.phi = &phi;
        g.rhs = p.alpha(k);
        for (NodeIndex i : t.nodes_at(k))
          g.terms.push_back({i, t.probability(i, Measure::P), p.benchmark[i]});
        prog.smooth.push_back(std::move(g));
      }
      break;
    case Style::TC:
      for (int k = 1; k <= n; ++k)
        for (NodeIndex i : t.nodes_at(k - 1)) {
          convex::SmoothConstraint g;
          g.phi = &phi;
          g.rhs = p.alpha(k);
          for (NodeIndex c : t.children(i))
            g.terms.push_back({c, t.transition(c, Measure::P), p.benchmark[c]});
          tc_index[i] = prog.smooth.size();
          prog.smooth.push_back(std::move(g));
        }
      break;
    case Style::LB: {
      std::vector<Term> total;
      for (NodeIndex leaf : t.leaves()) {
        const std::size_t e = prog.cost.size();
        prog.cost.push_back(0.0);
        total.push_back({e, t.probability(leaf, Measure::P)});
        for (NodeIndex i = leaf; t.date(i) >= 1; i = *t.parent(i)) {
          convex::SmoothConstraint g;
          g.phi = &phi;
          g.rhs = p.alpha(t.date(i));
          g.terms.push_back({i, 1.0, p.benchmark[i]});
          g.linear.push_back({e, -1.0});
          prog.smooth.push_back(std::move(g));
        }
      }
      prog.rows.push_back({std::move(total), Sense::LessEqual, 0.0});
      break;
    }
    case Style::CVAR:
      throw PreconditionError("internal: CVaR style is linear");
  }

  // Strictly feasible start: wealth decreasing by one per date, high enough
  // that every loss sits halfway between its infimum and the smallest tolerance.
  const double level = 0.5 * (l.inf_limit() + amin);
  double smax = -std::numeric_limits<double>::infinity();
  for (NodeIndex i = 0; i < t.size(); ++i) smax = std::max(smax, p.benchmark[i]);
  const double base = smax + l.generalized_inverse(level) + 1.0;
  std::vector<double> x0(prog.cost.size(), 0.0);
  for (NodeIndex i = 0; i < t.size(); ++i) x0[i] = std::max(base, guard + 1.0) + (n - t.date(i));
  if (p.style == Style::LB) {
    const double neg = 0.5 * (l.inf_limit() - amin);
    for (std::size_t j = t.size(); j < x0.size(); ++j) x0[j] = 0.5 * neg;
  }

  convex::BarrierOptions bo;
  bo.gap_tolerance = o.barrier_gap;
  convex::BarrierResult br = convex::minimize(prog, x0, bo);
  if (br.status == convex::BarrierStatus::Unbounded)
    throw Unbounded("objective unbounded below: constraints do not bound the wealth");
  if (br.status != convex::BarrierStatus::Optimal)
    throw SolverFailure("barrier: " + convex::to_string(br.status));

  SolveResult r = finish(p, br.x, "oracle-barrier");
  r.diagnostics["gap_bound"] = br.gap_bound;
  r.diagnostics["newton_steps"] = br.newton_steps;
  r.diagnostics["variables"] = static_cast<double>(prog.cost.size());
  if (p.style == Style::TC) {
    r.multipliers = AdaptedProcess(t, 0, n - 1);
    for (NodeIndex i = 0; i < t.size(); ++i)
      if (tc_index[i] != SIZE_MAX) r.multipliers[i] = br.smooth_multipliers[tc_index[i]];
  }
  if (o.box_guard) r.notes.push_back("box guard M >= " + std::to_string(guard) + " applied");
  return r;
}

}  // namespace

SolveResult solve_oracle(const HedgeProblem& problem, const OracleOptions& options) {
  const bool linear = problem.style == Style::CVAR || problem.loss.kind() == LossKind::Call;
  check_cap(problem, linear, options);
  return linear ? solve_linear(problem, options) : solve_smooth(problem, options);
}

OrderingReport verify_inclusion_ordering(const HedgeProblem& problem, double tol, bool strict,
                                         const OracleOptions& options) {
  OrderingReport r;
  r.eu = solve_oracle(problem.with_style(Style::EU), options).v0;
  r.tc = solve_oracle(problem.with_style(Style::TC), options).v0;
  r.lb = solve_oracle(problem.with_style(Style::LB), options).v0;
  r.worst = std::max(r.eu - r.tc, r.tc - r.lb);
  r.ordered = r.worst <= tol;
  if (!r.ordered && strict) {
    std::ostringstream os;
    os.precision(12);
    os << "inclusion ordering violated: EU=" << r.eu << " TC=" << r.tc << " LB=" << r.lb;
    throw SolverFailure(os.str());
  }
  return r;
}

}  // namespace alm
