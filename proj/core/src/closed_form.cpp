#include "alm/closed_form.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "alm/errors.hpp"

namespace alm {

namespace {

double mean(const std::vector<double>& v, const std::vector<double>& p) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += p[i] * v[i];
  return acc;
}

void check_atoms(const std::vector<double>& prob, std::initializer_list<std::size_t> sizes) {
  for (std::size_t s : sizes)
    if (s != prob.size()) throw InvalidInput("atom vectors have mismatched sizes");
  for (double w : prob)
    if (!(w >= 0.0)) throw InvalidInput("atom weights must be non-negative");
}

void require_risk_neutral(const HedgeProblem& p, const char* what) {
  if (!p.tree.risk_neutral(1e-12))
    throw PreconditionError(std::string(what) + " needs identical P and Q");
}

// Date-1 atoms of a two-date problem: S_1 and E[S_2 | F_1].
struct DateOneAtoms {
  std::vector<NodeIndex> nodes;
  std::vector<double> s1, c, prob;
};

DateOneAtoms date_one_atoms(const HedgeProblem& p) {
  DateOneAtoms a;
  AdaptedProcess c = conditional_expectation(p.tree, p.benchmark, Measure::P, 2, 1);
  for (NodeIndex i : p.tree.nodes_at(1)) {
    a.nodes.push_back(i);
    a.s1.push_back(p.benchmark[i]);
    a.c.push_back(c[i]);
    a.prob.push_back(p.tree.probability(i, Measure::P));
  }
  return a;
}

// Extends a date-1 wealth to the tree: M_2 = S_2 + M_1 - E[S_2 | F_1], M_0 = E[M_1].
AdaptedProcess extend_two_dates(const HedgeProblem& p, const DateOneAtoms& a,
                                const std::vector<double>& m1) {
  AdaptedProcess M(p.tree, 0, 2);
  double m0 = 0.0;
  for (std::size_t j = 0; j < a.nodes.size(); ++j) {
    const NodeIndex i = a.nodes[j];
    M[i] = m1[j];
    m0 += a.prob[j] * m1[j];
    for (NodeIndex c : p.tree.children(i)) M[c] = p.benchmark[c] + m1[j] - a.c[j];
  }
  M[p.tree.root()] = m0;
  return M;
}

}  // namespace

ClosedFormResult n1_value(const HedgeProblem& problem, std::optional<int> part) {
  const ScenarioTree& t = problem.tree;
  if (t.dates() != 1) throw PreconditionError("single-date closed form needs n = 1");
  const double alpha = problem.alpha(1);
  if (!(alpha > problem.loss.inf_limit()) &&
      !(problem.loss.kind() == LossKind::Call && alpha >= 0.0))
    throw PreconditionError("tolerance must exceed the infimum of the loss");
  const int which = part.value_or(t.risk_neutral(1e-12) ? 2 : 1);

  ClosedFormResult r;
  AdaptedProcess M(t, 0, 1);
  if (which == 2) {
    require_risk_neutral(problem, "single-date cushion formula");
    const double cushion = problem.loss.generalized_inverse(alpha);
    double v = 0.0;
    for (NodeIndex i : t.nodes_at(1)) {
      M[i] = problem.benchmark[i] + cushion;
      v += t.probability(i, Measure::P) * M[i];
    }
    r.formula_id = "n1-cushion";
    r.value = v;
  } else if (which == 1) {
    LambdaSolution ls = solve_lambda(t, problem.loss, 1, std::nullopt, alpha);
    const double lambda = ls.lambda[t.root()];
    double v = 0.0;
    for (NodeIndex i : t.nodes_at(1)) {
      const double r_i = t.transition(i, Measure::Q) / t.transition(i, Measure::P);
      M[i] = problem.benchmark[i] + problem.loss.inverse_derivative(lambda * r_i);
      v += t.probability(i, Measure::Q) * M[i];
    }
    r.formula_id = "n1-multiplier";
    r.value = v;
    r.binding_term = "lambda=" + std::to_string(lambda);
  } else {
    throw InvalidInput("single-date formula part must be 1 or 2");
  }
  M[t.root()] = r.value;
  r.process = M;
  return r;
}

CoincidingResult coinciding_value(const HedgeProblem& problem, double tol) {
  require_risk_neutral(problem, "coinciding-case formula");
  const ScenarioTree& t = problem.tree;
  const int n = t.dates();
  std::vector<double> cushion(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k)
    cushion[static_cast<std::size_t>(k)] = problem.loss.generalized_inverse(problem.alpha(k));

  AdaptedProcess terminal(t, n, n);
  for (NodeIndex i : t.nodes_at(n)) terminal[i] = problem.benchmark[i] + cushion[n];
  AdaptedProcess M(t, 0, n);
  for (NodeIndex i : t.nodes_at(n)) M[i] = terminal[i];
  for (int k = n - 1; k >= 0; --k)
    for (NodeIndex i : t.nodes_at(k))
      M[i] = conditional_mean(t, i, Measure::P, [&](NodeIndex c) { return M[c]; });

  CoincidingResult out;
  out.holds = true;
  for (int k = 1; k <= n && out.holds; ++k)
    for (NodeIndex i : t.nodes_at(k))
      if (M[i] < problem.benchmark[i] + cushion[static_cast<std::size_t>(k)] - tol) {
        out.holds = false;
        out.failing_node = i;
        break;
      }
  if (out.holds) {
    out.result.value = M[t.root()];
    out.result.formula_id = "coinciding";
    out.result.process = M;
  }
  return out;
}

ClosedFormResult two_objective_value(const std::vector<double>& X, const std::vector<double>& Y,
                                     const std::vector<double>& prob, double alpha, double beta) {
  check_atoms(prob, {X.size(), Y.size()});
  if (!(alpha >= 0.0 && beta >= 0.0)) throw PreconditionError("tolerances must be non-negative");
  const std::size_t m = X.size();
  double ex = 0.0, ey = 0.0, emax = 0.0, a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    ex += prob[i] * X[i];
    ey += prob[i] * Y[i];
    emax += prob[i] * std::max(X[i], Y[i]);
    a += prob[i] * std::max(X[i] - Y[i], 0.0);
    b += prob[i] * std::max(Y[i] - X[i], 0.0);
  }
  const double t1 = ex - alpha, t2 = ey - beta, t3 = emax - alpha - beta;

  ClosedFormResult r;
  r.formula_id = "two-objective";
  r.value = std::max({t1, t2, t3});
  r.witness.resize(m);
  if (a >= alpha && b >= beta && a > 0.0 && b > 0.0) {
    r.binding_term = "both";
    for (std::size_t i = 0; i < m; ++i)
      r.witness[i] = std::max(X[i], Y[i]) - alpha * std::max(X[i] - Y[i], 0.0) / a -
                     beta * std::max(Y[i] - X[i], 0.0) / b;
  } else if (t1 >= t2) {
    // Shift X down: proportionally on {X > Y} up to E[(X-Y)^+], uniformly beyond.
    r.binding_term = "first";
    const double share = a > 0.0 ? std::min(alpha, a) / a : 0.0;
    const double flat = std::max(alpha - a, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      r.witness[i] = X[i] - share * std::max(X[i] - Y[i], 0.0) - flat;
  } else {
    r.binding_term = "second";
    const double share = b > 0.0 ? std::min(beta, b) / b : 0.0;
    const double flat = std::max(beta - b, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      r.witness[i] = Y[i] - share * std::max(Y[i] - X[i], 0.0) - flat;
  }
  return r;
}

ClosedFormResult two_objective_lookback(const std::vector<double>& X,
                                        const std::vector<double>& Y,
                                        const std::vector<double>& prob, double alpha,
                                        double beta) {
  check_atoms(prob, {X.size(), Y.size()});
  if (!(alpha >= 0.0 && beta >= 0.0)) throw PreconditionError("tolerances must be non-negative");
  ClosedFormResult r;
  r.formula_id = "two-objective-lookback";
  r.binding_term = "pathwise";
  r.witness.resize(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    r.witness[i] = std::max(X[i] - alpha, Y[i] - beta);
    r.value += prob[i] * r.witness[i];
  }
  return r;
}

ClosedFormResult ordered_objectives_value(const std::vector<std::vector<double>>& Z,
                                          const std::vector<double>& prob,
                                          const std::vector<double>& alphas) {
  const std::size_t n = Z.size();
  if (n == 0 || alphas.size() != n) throw InvalidInput("need one tolerance per objective");
  for (const auto& z : Z) check_atoms(prob, {z.size()});
  for (double a : alphas)
    if (!(a >= 0.0)) throw PreconditionError("tolerances must be non-negative");
  for (std::size_t k = 0; k + 1 < n; ++k)
    for (std::size_t i = 0; i < prob.size(); ++i)
      if (Z[k][i] > Z[k + 1][i])
        throw PreconditionError("objectives are not ordered: Z_" + std::to_string(k + 1) +
                                " > Z_" + std::to_string(k + 2) + " at atom " + std::to_string(i));

  std::vector<double> ez(n), e(n);
  for (std::size_t k = 0; k < n; ++k) {
    ez[k] = mean(Z[k], prob);
    e[k] = ez[k] - alphas[k];
  }
  // An earlier constraint with at least the same value implies every later one.
  std::vector<std::size_t> kept{0};
  for (std::size_t j = 1; j < n; ++j)
    if (e[j] > e[kept.back()]) kept.push_back(j);

  const std::size_t m = kept.size();
  const std::size_t last = kept.back();
  ClosedFormResult r;
  r.formula_id = "ordered-objectives";
  r.value = e[last];
  r.binding_term = "k=" + std::to_string(last + 1);
  r.witness.resize(prob.size());

  const double a_last = alphas[last];
  if (a_last == 0.0) {
    r.witness = Z[last];
  } else if (ez[last] - ez[kept[0]] >= a_last) {
    std::size_t ks = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (ez[last] - ez[kept[j]] >= a_last) ks = j;
    const std::size_t lo = kept[ks], hi = kept[ks + 1];
    const double w = (ez[hi] - ez[last] + a_last) / (ez[hi] - ez[lo]);
    for (std::size_t i = 0; i < prob.size(); ++i)
      r.witness[i] = w * Z[lo][i] + (1.0 - w) * Z[hi][i];
  } else {
    const double C = a_last - (ez[last] - ez[kept[0]]);
    for (std::size_t i = 0; i < prob.size(); ++i) r.witness[i] = Z[kept[0]][i] - C;
  }
  return r;
}

RiskNeutralTriple riskneutral_n2(const HedgeProblem& problem) {
  if (problem.dates() != 2) throw PreconditionError("risk-neutral triple needs n = 2");
  require_risk_neutral(problem, "risk-neutral triple");
  if (problem.loss.kind() != LossKind::Call)
    throw PreconditionError("risk-neutral triple needs the call loss");
  const double a1 = problem.alpha(1), a2 = problem.alpha(2);
  if (!(a1 >= 0.0 && a2 >= 0.0)) throw PreconditionError("tolerances must be non-negative");

  DateOneAtoms at = date_one_atoms(problem);
  RiskNeutralTriple out;

  out.eu = two_objective_value(at.s1, at.c, at.prob, a1, a2);
  out.eu.formula_id = "riskneutral-n2-EU";
  out.eu.process = extend_two_dates(problem, at, out.eu.witness);

  std::vector<double> floor(at.c.size());
  for (std::size_t j = 0; j < floor.size(); ++j) floor[j] = at.c[j] - a2;
  out.tc = two_objective_value(at.s1, floor, at.prob, a1, 0.0);
  out.tc.formula_id = "riskneutral-n2-TC";
  out.tc.process = extend_two_dates(problem, at, out.tc.witness);

  out.lb = two_objective_lookback(at.s1, at.c, at.prob, a1, a2);
  out.lb.formula_id = "riskneutral-n2-LB";
  out.lb.process = extend_two_dates(problem, at, out.lb.witness);
  return out;
}

ClosedFormResult monotone_exploss_value(const HedgeProblem& problem) {
  require_risk_neutral(problem, "monotone-benchmark formula");
  if (problem.loss.kind() != LossKind::Call)
    throw PreconditionError("monotone-benchmark formula needs the call loss");
  const ScenarioTree& t = problem.tree;
  const int n = t.dates();
  for (int k = 2; k <= n; ++k)
    for (NodeIndex i : t.nodes_at(k))
      if (problem.benchmark[i] < problem.benchmark[*t.parent(i)])
        throw PreconditionError("benchmark decreases at node '" + t.id(i) + "'");

  auto leaves = t.leaves();
  std::vector<double> prob;
  for (NodeIndex leaf : leaves) prob.push_back(t.probability(leaf, Measure::P));
  std::vector<std::vector<double>> Z(static_cast<std::size_t>(n));
  for (NodeIndex leaf : leaves)
    for (int k = 1; k <= n; ++k)
      Z[static_cast<std::size_t>(k - 1)].push_back(problem.benchmark[t.ancestor(leaf, k)]);

  ClosedFormResult r = ordered_objectives_value(Z, prob, problem.alphas);
  r.formula_id = "monotone-benchmark";
  AdaptedProcess M(t, 0, n);
  for (std::size_t j = 0; j < leaves.size(); ++j) M[leaves[j]] = r.witness[j];
  for (int k = n - 1; k >= 0; --k)
    for (NodeIndex i : t.nodes_at(k))
      M[i] = conditional_mean(t, i, Measure::P, [&](NodeIndex c) { return M[c]; });
  r.process = M;
  return r;
}

}  // namespace alm
