#include <algorithm>
#include <cmath>
#include <limits>

#include "alm/dp.hpp"
#include "alm/errors.hpp"

namespace alm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_tolerances(const HedgeProblem& p, bool allow_zero_call) {
  for (int k = 1; k <= p.dates(); ++k) {
    const double a = p.alpha(k);
    const bool ok = a > p.loss.inf_limit() ||
                    (allow_zero_call && p.loss.kind() == LossKind::Call && a >= 0.0);
    if (!ok)
      throw Infeasible("tolerance at date " + std::to_string(k) +
                       " does not exceed the infimum of the loss");
  }
}

}  // namespace

SolveResult tc_solve_general(const HedgeProblem& problem) {
  const ScenarioTree& t = problem.tree;
  const LossFunction& l = problem.loss;
  const int n = t.dates();
  if (!l.satisfies_inada())
    throw PreconditionError("time-consistent recursion needs a loss with an inverse marginal");
  require_tolerances(problem, false);

  SolveResult r;
  r.style = Style::TC;
  r.solver = "dp-tc-general";
  r.wealth = AdaptedProcess(t, 0, n);
  r.multipliers = AdaptedProcess(t, 0, n - 1, kNaN);
  r.binding.assign(t.size(), false);
  AdaptedProcess vhat(t, 0, n);
  double residual = 0.0;
  int binding = 0;

  auto ratio = [&](NodeIndex c) {
    return t.transition(c, Measure::Q) / t.transition(c, Measure::P);
  };

  {
    LambdaSolution ls = solve_lambda(t, l, n, std::nullopt, problem.alpha(n));
    residual = std::max(residual, ls.max_residual);
    for (NodeIndex i : t.nodes_at(n - 1)) {
      const double lambda = ls.lambda[i];
      r.multipliers[i] = lambda;
      r.binding[i] = true;
      ++binding;
      double v = 0.0;
      for (NodeIndex c : t.children(i)) {
        r.wealth[c] = problem.benchmark[c] + l.inverse_derivative(lambda * ratio(c));
        v += t.transition(c, Measure::Q) * r.wealth[c];
      }
      vhat[i] = v;
    }
  }

  for (int k = n - 1; k >= 1; --k) {
    AdaptedProcess floor(t, k, k);
    for (NodeIndex c : t.nodes_at(k)) floor[c] = vhat[c] - problem.benchmark[c];
    LambdaSolution ls = solve_lambda(t, l, k, floor, problem.alpha(k));
    residual = std::max(residual, ls.max_residual);
    for (NodeIndex i : t.nodes_at(k - 1)) {
      double v = 0.0;
      for (NodeIndex c : t.children(i)) {
        double m = vhat[c];
        if (ls.binding[i])
          m = std::max(vhat[c], problem.benchmark[c] + l.inverse_derivative(ls.lambda[i] * ratio(c)));
        r.wealth[c] = m;
        v += t.transition(c, Measure::Q) * m;
      }
      if (ls.binding[i]) {
        r.multipliers[i] = ls.lambda[i];
        r.binding[i] = true;
        ++binding;
      }
      vhat[i] = v;
    }
  }
  r.wealth[t.root()] = vhat[t.root()];
  r.v0 = vhat[t.root()];
  r.diagnostics["lambda_residual"] = residual;
  r.diagnostics["binding_nodes"] = binding;
  return r;
}

SolveResult tc_solve_riskneutral(const HedgeProblem& problem) {
  const ScenarioTree& t = problem.tree;
  const LossFunction& l = problem.loss;
  const int n = t.dates();
  if (!t.risk_neutral(1e-12))
    throw PreconditionError("risk-neutral recursion rejected: P and Q differ");
  require_tolerances(problem, true);
  const bool call = l.kind() == LossKind::Call;

  SolveResult r;
  r.style = Style::TC;
  r.solver = call ? "dp-tc-riskneutral-max" : "dp-tc-riskneutral";
  r.wealth = AdaptedProcess(t, 0, n);
  r.multipliers = AdaptedProcess(t, 0, n - 1, kNaN);
  r.binding.assign(t.size(), false);
  AdaptedProcess vhat(t, 0, n);

  const double cushion = l.generalized_inverse(problem.alpha(n));
  for (NodeIndex i : t.nodes_at(n - 1)) {
    double v = 0.0;
    for (NodeIndex c : t.children(i)) {
      r.wealth[c] = problem.benchmark[c] + cushion;
      v += t.transition(c, Measure::P) * r.wealth[c];
    }
    vhat[i] = v;
    r.multipliers[i] = cushion;
    r.binding[i] = true;
  }

  double max_form_gap = 0.0;
  for (int k = n - 1; k >= 1; --k) {
    const double alpha = problem.alpha(k);
    for (NodeIndex i : t.nodes_at(k - 1)) {
      std::vector<double> w, f;
      double loss = 0.0;
      for (NodeIndex c : t.children(i)) {
        w.push_back(t.transition(c, Measure::P));
        f.push_back(vhat[c] - problem.benchmark[c]);
        loss += w.back() * l(f.back());
      }
      const bool bind = loss > alpha;
      double level = kNaN;
      if (bind) level = solve_level_at(l, w, f, alpha);
      double v = 0.0, cont = 0.0, hedge = 0.0;
      for (NodeIndex c : t.children(i)) {
        const double m = bind ? std::max(vhat[c], problem.benchmark[c] + level) : vhat[c];
        r.wealth[c] = m;
        v += t.transition(c, Measure::P) * m;
        cont += t.transition(c, Measure::P) * vhat[c];
        hedge += t.transition(c, Measure::P) * std::max(vhat[c], problem.benchmark[c]);
      }
      if (call) {
        const double max_form = std::max(cont, hedge - alpha);
        max_form_gap = std::max(max_form_gap, std::abs(max_form - v));
        v = max_form;
      }
      if (bind) {
        r.multipliers[i] = level;
        r.binding[i] = true;
      }
      vhat[i] = v;
    }
  }
  r.wealth[t.root()] = vhat[t.root()];
  r.v0 = vhat[t.root()];
  if (call) r.diagnostics["max_form_gap"] = max_form_gap;
  return r;
}

}  // namespace alm
