#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "alm/barrier.hpp"
#include "alm/dp.hpp"
#include "alm/errors.hpp"
#include "alm/linear_program.hpp"

namespace alm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_two_dates(const HedgeProblem& p) {
  if (p.dates() != 2) throw PreconditionError("two-date solver called with n = " + std::to_string(p.dates()));
}

// One date-1 node with its children.
struct Cell {
  NodeIndex node;
  double P = 0.0, Q = 0.0;  // unconditional
  double S1 = 0.0;
  double A = 0.0;  // E^Q[S2 | node]
  std::vector<NodeIndex> kids;
  std::vector<double> p, q, r, S2;
};

std::vector<Cell> cells_of(const HedgeProblem& prob) {
  const ScenarioTree& t = prob.tree;
  std::vector<Cell> out;
  for (NodeIndex j : t.nodes_at(1)) {
    Cell c;
    c.node = j;
    c.P = t.probability(j, Measure::P);
    c.Q = t.probability(j, Measure::Q);
    c.S1 = prob.benchmark[j];
    for (NodeIndex k : t.children(j)) {
      c.kids.push_back(k);
      c.p.push_back(t.transition(k, Measure::P));
      c.q.push_back(t.transition(k, Measure::Q));
      c.r.push_back(c.q.back() / c.p.back());
      c.S2.push_back(prob.benchmark[k]);
      c.A += c.q.back() * c.S2.back();
    }
    out.push_back(std::move(c));
  }
  return out;
}

SolveResult base_result(const HedgeProblem& prob, const std::string& solver) {
  SolveResult r;
  r.style = Style::EU;
  r.solver = solver;
  r.wealth = AdaptedProcess(prob.tree, 0, 2);
  r.binding.assign(prob.tree.size(), false);
  return r;
}

double log_sum(double la, double a, double lb, double b) {
  // log(la e^a + lb e^b) for la, lb >= 0
  const double m = std::max(a, b);
  return m + std::log(la * std::exp(a - m) + lb * std::exp(b - m));
}

// Threshold c < 0 with sum q I(c r) = budget, by bisection on log(-c).
double threshold_for(const LossFunction& l, const Cell& c, double budget) {
  auto g = [&](double u) {
    const double y = -std::exp(u);
    double s = 0.0;
    for (std::size_t i = 0; i < c.q.size(); ++i) s += c.q[i] * l.inverse_derivative(y * c.r[i]);
    return s;  // decreasing in u
  };
  double lo = -1.0, hi = 1.0;
  int guard = 0;
  while (g(lo) < budget) {
    lo -= 2.0 * (1.0 + std::abs(lo));
    if (++guard > 200 || lo < -700.0) throw SolverFailure("threshold map: budget too large");
  }
  guard = 0;
  while (g(hi) > budget) {
    hi += 2.0 * (1.0 + std::abs(hi));
    if (++guard > 200 || hi > 700.0) throw SolverFailure("threshold map: budget too small");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) >= budget ? lo : hi) = mid;
  }
  return -std::exp(0.5 * (lo + hi));
}

SolveResult eu_call_riskneutral(const HedgeProblem& prob) {
  const auto cells = cells_of(prob);
  lp::LinearProgram lp;
  std::vector<std::size_t> m(cells.size()), s1(cells.size()), s2(cells.size());
  for (std::size_t j = 0; j < cells.size(); ++j) {
    m[j] = lp.add_variable(cells[j].Q);
    s1[j] = lp.add_variable(0.0, 0.0);
    s2[j] = lp.add_variable(0.0, 0.0);
    lp.add_row({{s1[j], 1.0}, {m[j], 1.0}}, lp::Sense::GreaterEqual, cells[j].S1);
    lp.add_row({{s2[j], 1.0}, {m[j], 1.0}}, lp::Sense::GreaterEqual, cells[j].A);
  }
  std::vector<lp::Term> b1, b2;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    b1.push_back({s1[j], cells[j].P});
    b2.push_back({s2[j], cells[j].P});
  }
  lp.add_row(b1, lp::Sense::LessEqual, prob.alpha(1));
  lp.add_row(b2, lp::Sense::LessEqual, prob.alpha(2));
  const lp::Solution sol = lp::solve(lp);
  if (sol.status == lp::Status::Infeasible) throw Infeasible("two-date call program infeasible");
  if (sol.status == lp::Status::Unbounded) throw Unbounded("two-date call program unbounded");
  if (sol.status != lp::Status::Optimal) throw SolverFailure("two-date call program: " + lp::to_string(sol.status));

  SolveResult r = base_result(prob, "dp-eu-call-lp");
  double v0 = 0.0;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const Cell& c = cells[j];
    const double M1 = sol.x[m[j]];
    r.wealth[c.node] = M1;
    for (std::size_t i = 0; i < c.kids.size(); ++i) r.wealth[c.kids[i]] = c.S2[i] + M1 - c.A;
    v0 += c.Q * M1;
  }
  r.wealth[prob.tree.root()] = v0;
  r.v0 = v0;
  r.diagnostics["duality_gap"] = sol.duality_gap;
  return r;
}

}  // namespace

std::string to_string(EuRegime r) {
  switch (r) {
    case EuRegime::FirstOnly: return "first-only";
    case EuRegime::SecondOnly: return "second-only";
    case EuRegime::Both: return "both";
  }
  return "?";
}

SolveResult eu_solve_n2(const HedgeProblem& problem) {
  require_two_dates(problem);
  const LossFunction& l = problem.loss;
  if (l.kind() == LossKind::Exponential) return eu_exponential_n2(problem);
  if (l.kind() == LossKind::Call) {
    if (!problem.tree.risk_neutral(1e-12))
      throw PreconditionError("two-date call recursion needs P = Q");
    return eu_call_riskneutral(problem);
  }
  return eu_solve_n2_generic(problem);
}

SolveResult eu_solve_n2_generic(const HedgeProblem& problem) {
  require_two_dates(problem);
  const LossFunction& l = problem.loss;
  if (!l.satisfies_inada() || !l.has_second_derivative())
    throw PreconditionError("generic two-date recursion needs an Inada loss with l''");
  for (int k = 1; k <= 2; ++k)
    if (!(problem.alpha(k) > l.inf_limit()))
      throw Infeasible("tolerance at date " + std::to_string(k) + " not above the infimum of the loss");

  const auto cells = cells_of(problem);
  const std::size_t J = cells.size();

  // N_j(M) = E^P[l(I(c r))] where E^Q[I(c r)] = M - A; cached per node.
  struct Cache {
    double M = std::numeric_limits<double>::quiet_NaN();
    double c = 0.0;
  };
  std::vector<std::shared_ptr<Cache>> caches;
  std::vector<convex::Scalar> own(J);
  for (std::size_t j = 0; j < J; ++j) {
    auto cache = std::make_shared<Cache>();
    caches.push_back(cache);
    const Cell* cell = &cells[j];
    auto thr = [cache, cell, &l](double M) {
      if (!(M == cache->M)) {
        cache->c = threshold_for(l, *cell, M - cell->A);
        cache->M = M;
      }
      return cache->c;
    };
    own[j].f = [thr, cell, &l](double M) {
      const double c = thr(M);
      double s = 0.0;
      for (std::size_t i = 0; i < cell->p.size(); ++i) s += cell->p[i] * l(l.inverse_derivative(c * cell->r[i]));
      return s;
    };
    own[j].d1 = [thr](double M) { return thr(M); };
    own[j].d2 = [thr, cell, &l](double M) {
      const double c = thr(M);
      double s = 0.0;
      for (std::size_t i = 0; i < cell->p.size(); ++i) {
        const double x = l.inverse_derivative(c * cell->r[i]);
        s += cell->p[i] * cell->r[i] * cell->r[i] / l.second_derivative(x);
      }
      return 1.0 / s;
    };
  }
  convex::Scalar phi{[&l](double x) { return l(x); }, [&l](double x) { return l.derivative(x); },
                     [&l](double x) { return l.second_derivative(x); }};

  convex::ConvexProgram prog;
  prog.cost.resize(J);
  convex::SmoothConstraint first, second;
  first.phi = &phi;
  first.rhs = problem.alpha(1);
  second.phi = &phi;
  second.rhs = problem.alpha(2);
  for (std::size_t j = 0; j < J; ++j) {
    prog.cost[j] = cells[j].Q;
    first.terms.push_back({j, cells[j].P, cells[j].S1});
    second.terms.push_back({j, cells[j].P, 0.0, &own[j]});
  }
  prog.smooth = {first, second};

  // strictly feasible start: each node meets both levels halfway to inf l
  const double lvl1 = 0.5 * (l.inf_limit() + problem.alpha(1));
  const double lvl2 = 0.5 * (l.inf_limit() + problem.alpha(2));
  std::vector<double> start(J);
  for (std::size_t j = 0; j < J; ++j) {
    const Cell& c = cells[j];
    std::vector<double> floors(c.p.size(), -kInf);
    const double lam = solve_lambda_at(l, c.p, c.r, floors, lvl2);
    double v = c.A;
    for (std::size_t i = 0; i < c.q.size(); ++i) v += c.q[i] * l.inverse_derivative(lam * c.r[i]);
    start[j] = std::max(c.S1 + l.generalized_inverse(lvl1), v) + 1.0;
  }

  const convex::BarrierResult br = convex::minimize(prog, start);
  if (br.status == convex::BarrierStatus::Unbounded) throw Unbounded("two-date program unbounded");
  if (br.status != convex::BarrierStatus::Optimal)
    throw SolverFailure("two-date barrier: " + convex::to_string(br.status));

  SolveResult r = base_result(problem, "dp-eu-generic");
  r.multipliers = AdaptedProcess(problem.tree, 1, 1);
  double v0 = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const Cell& c = cells[j];
    const double M1 = br.x[j];
    const double thr = threshold_for(l, c, M1 - c.A);
    r.wealth[c.node] = M1;
    r.multipliers[c.node] = thr;
    for (std::size_t i = 0; i < c.kids.size(); ++i)
      r.wealth[c.kids[i]] = c.S2[i] + l.inverse_derivative(thr * c.r[i]);
    v0 += c.Q * M1;
  }
  r.wealth[problem.tree.root()] = v0;
  r.v0 = v0;
  r.diagnostics["gap_bound"] = br.gap_bound;
  r.diagnostics["newton_steps"] = br.newton_steps;
  r.diagnostics["max_violation"] = convex::max_violation(prog, br.x);
  return r;
}

SolveResult eu_exponential_n2(const HedgeProblem& problem) {
  require_two_dates(problem);
  const LossFunction& l = problem.loss;
  if (l.kind() != LossKind::Exponential) throw PreconditionError("exponential two-date system needs the exponential loss");
  const double p = l.exponent();
  const double a1 = problem.alpha(1), a2 = problem.alpha(2);
  if (!(a1 > -1.0) || !(a2 > -1.0)) throw Infeasible("exponential loss tolerances must exceed -1");

  const auto cells = cells_of(problem);
  const std::size_t J = cells.size();
  std::vector<double> Z1(J), B(J), logX(J);  // B = A + D
  double eqx = 0.0, eqinv = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const Cell& c = cells[j];
    Z1[j] = c.Q / c.P;
    double d = 0.0;
    for (std::size_t i = 0; i < c.p.size(); ++i) d -= c.q[i] * std::log(c.r[i]);
    B[j] = c.A + d / p;
    logX[j] = p * (B[j] - c.S1);
    eqx += c.Q * std::exp(logX[j]);
    eqinv += c.Q * std::exp(-logX[j]);
  }
  const double ratio = (1.0 + a1) / (1.0 + a2);

  SolveResult r = base_result(problem, "dp-eu-exponential");
  std::vector<double> M1(J);
  EuRegime regime;
  if (ratio <= 1.0 / eqx) {
    regime = EuRegime::FirstOnly;
    for (std::size_t j = 0; j < J; ++j) M1[j] = cells[j].S1 - std::log((1.0 + a1) * Z1[j]) / p;
  } else if (ratio >= eqinv) {
    regime = EuRegime::SecondOnly;
    for (std::size_t j = 0; j < J; ++j) M1[j] = B[j] - std::log((1.0 + a2) * Z1[j]) / p;
  } else {
    regime = EuRegime::Both;
    auto g = [&](double lt) {
      const double t = std::exp(lt);
      double f = 0.0;
      for (std::size_t j = 0; j < J; ++j) f += cells[j].Q / (t + std::exp(logX[j]));
      return f / (1.0 - t * f);  // decreasing from E^Q[1/X] to 1/E^Q[X]
    };
    double lo = -1.0, hi = 1.0;
    for (int i = 0; g(lo) < ratio && i < 200; ++i) lo -= 2.0 * (1.0 + std::abs(lo));
    for (int i = 0; g(hi) > ratio && i < 200; ++i) hi += 2.0 * (1.0 + std::abs(hi));
    if (g(lo) < ratio || g(hi) > ratio) throw SolverFailure("exponential system: multiplier ratio not bracketed");
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (g(mid) >= ratio ? lo : hi) = mid;
    }
    const double t = std::exp(0.5 * (lo + hi));
    const double mu = 1.0 / (p * (t * (1.0 + a1) + (1.0 + a2)));
    const double lambda = t * mu;
    r.diagnostics["lambda"] = lambda;
    r.diagnostics["mu"] = mu;
    for (std::size_t j = 0; j < J; ++j)
      M1[j] = (std::log(p) + log_sum(lambda, p * cells[j].S1, mu, p * B[j]) - std::log(Z1[j])) / p;
  }

  double v0 = 0.0, loss1 = 0.0, loss2 = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const Cell& c = cells[j];
    const double N = std::expm1(-p * (M1[j] - B[j]));
    r.wealth[c.node] = M1[j];
    for (std::size_t i = 0; i < c.kids.size(); ++i) {
      r.wealth[c.kids[i]] = c.S2[i] - std::log((1.0 + N) * c.r[i]) / p;
      loss2 += c.P * c.p[i] * l(r.wealth[c.kids[i]] - c.S2[i]);
    }
    loss1 += c.P * l(M1[j] - c.S1);
    v0 += c.Q * M1[j];
  }
  r.wealth[problem.tree.root()] = v0;
  r.v0 = v0;
  r.diagnostics["regime"] = static_cast<double>(static_cast<int>(regime));
  r.diagnostics["residual_first"] = loss1 - a1;
  r.diagnostics["residual_second"] = loss2 - a2;
  r.notes.push_back("regime " + to_string(regime));
  return r;
}

}  // namespace alm
