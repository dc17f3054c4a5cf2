#include "alm/problem.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "alm/closed_form.hpp"
#include "alm/errors.hpp"

namespace alm {

std::string to_string(Style s) {
  switch (s) {
    case Style::EU: return "EU";
    case Style::TC: return "TC";
    case Style::LB: return "LB";
    case Style::CVAR: return "CVAR";
  }
  return "?";
}

Style style_from_string(const std::string& raw) {
  std::string s = raw;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  if (s == "EU") return Style::EU;
  if (s == "TC") return Style::TC;
  if (s == "LB") return Style::LB;
  if (s == "CVAR") return Style::CVAR;
  throw InvalidInput("unknown constraint style '" + raw + "' (expected EU, TC, LB or CVAR)");
}

namespace {

void validate(const HedgeProblem& p) {
  const int n = p.tree.dates();
  if (p.alphas.size() != static_cast<std::size_t>(n))
    throw InvalidInput("expected " + std::to_string(n) + " tolerances, got " +
                       std::to_string(p.alphas.size()));
  for (double a : p.alphas)
    if (std::isnan(a)) throw InvalidInput("tolerance is NaN");
  if (p.style == Style::CVAR && !(p.cvar_level >= 0.0 && p.cvar_level < 1.0))
    throw InvalidInput("CVaR level must lie in [0, 1)");
  for (int k = 1; k <= n; ++k)
    for (NodeIndex i : p.tree.nodes_at(k))
      if (!std::isfinite(p.benchmark[i]))
        throw InvalidInput("benchmark missing or not finite at node '" + p.tree.id(i) + "'");
}

}  // namespace

HedgeProblem HedgeProblem::from_payments(ScenarioTree tree, const AdaptedProcess& payments,
                                         LossFunction loss, std::vector<double> alphas,
                                         Style style, double cvar_level) {
  if (payments.size() != tree.size() || !payments.defined_at(1) ||
      !payments.defined_at(tree.dates()))
    throw InvalidInput("payments must be defined on dates 1..n");
  HedgeProblem p{std::move(tree), payments, {}, std::move(loss), std::move(alphas), style,
                 cvar_level};
  p.benchmark = AdaptedProcess(p.tree, 0, p.tree.dates(), 0.0);
  for (NodeIndex i = 1; i < p.tree.size(); ++i)
    p.benchmark[i] = p.benchmark[*p.tree.parent(i)] + payments[i];
  validate(p);
  return p;
}

HedgeProblem HedgeProblem::from_benchmark(ScenarioTree tree, const AdaptedProcess& benchmark,
                                          LossFunction loss, std::vector<double> alphas,
                                          Style style, double cvar_level) {
  if (benchmark.size() != tree.size() || !benchmark.defined_at(1) ||
      !benchmark.defined_at(tree.dates()))
    throw InvalidInput("benchmark must be defined on dates 1..n");
  HedgeProblem p{std::move(tree), {}, {}, std::move(loss), std::move(alphas), style, cvar_level};
  p.benchmark = AdaptedProcess(p.tree, 0, p.tree.dates(), 0.0);
  p.payments = AdaptedProcess(p.tree, 1, p.tree.dates(), 0.0);
  for (NodeIndex i = 1; i < p.tree.size(); ++i) {
    p.benchmark[i] = benchmark[i];
    p.payments[i] = benchmark[i] - p.benchmark[*p.tree.parent(i)];
  }
  validate(p);
  return p;
}

HedgeProblem HedgeProblem::with_style(Style s) const {
  HedgeProblem p = *this;
  p.style = s;
  return p;
}

HedgeProblem HedgeProblem::with_alphas(std::vector<double> a) const {
  HedgeProblem p = *this;
  p.alphas = std::move(a);
  validate(p);
  return p;
}

AdaptedProcess conditional_losses(const HedgeProblem& problem, const AdaptedProcess& M, int k) {
  const ScenarioTree& t = problem.tree;
  AdaptedProcess out(t, k - 1, k - 1);
  for (NodeIndex i : t.nodes_at(k - 1))
    out[i] = conditional_mean(t, i, Measure::P, [&](NodeIndex c) {
      return problem.loss(M[c] - problem.benchmark[c]);
    });
  return out;
}

double expected_loss(const HedgeProblem& problem, const AdaptedProcess& M, int k) {
  double acc = 0.0;
  for (NodeIndex i : problem.tree.nodes_at(k))
    acc += problem.tree.probability(i, Measure::P) * problem.loss(M[i] - problem.benchmark[i]);
  return acc;
}

double lookback_excess(const HedgeProblem& problem, const AdaptedProcess& M) {
  const ScenarioTree& t = problem.tree;
  double acc = 0.0;
  for (NodeIndex leaf : t.leaves()) {
    double worst = -std::numeric_limits<double>::infinity();
    for (NodeIndex i = leaf; t.date(i) >= 1; i = *t.parent(i))
      worst = std::max(worst, problem.loss(M[i] - problem.benchmark[i]) - problem.alpha(t.date(i)));
    acc += t.probability(leaf, Measure::P) * worst;
  }
  return acc;
}

double cvar_shortfall(const HedgeProblem& problem, const AdaptedProcess& M, int k) {
  std::vector<double> x, w;
  for (NodeIndex i : problem.tree.nodes_at(k)) {
    x.push_back(std::max(problem.benchmark[i] - M[i], 0.0));
    w.push_back(problem.tree.probability(i, Measure::P));
  }
  return cvar_of(x, w, problem.cvar_level);
}

FeasibilityReport check_feasibility(const HedgeProblem& problem, const AdaptedProcess& M,
                                    double tol) {
  const ScenarioTree& t = problem.tree;
  const int n = t.dates();
  if (M.size() != t.size() || !M.defined_at(0) || !M.defined_at(n))
    throw InvalidInput("wealth process must be defined on dates 0..n");
  FeasibilityReport r;
  auto fail = [&](double excess, const std::string& what) {
    r.max_violation = std::max(r.max_violation, excess);
    if (excess > tol) {
      r.feasible = false;
      std::ostringstream os;
      os << what << " violated by " << excess;
      r.failures.push_back(os.str());
    }
  };

  for (NodeIndex i = 0; i < t.size(); ++i) {
    if (!std::isfinite(M[i])) {
      r.feasible = false;
      r.failures.push_back("wealth not finite at node '" + t.id(i) + "'");
      return r;
    }
  }
  SupermartingaleReport sm = is_Q_supermartingale(t, M, tol);
  for (const auto& v : sm.violations)
    fail(v.conditional_mean - v.value, "supermartingale at node '" + t.id(v.node) + "'");
  r.max_violation = std::max(r.max_violation, sm.max_excess);

  switch (problem.style) {
    case Style::EU:
      for (int k = 1; k <= n; ++k)
        fail(expected_loss(problem, M, k) - problem.alpha(k),
             "expected-loss constraint at date " + std::to_string(k));
      break;
    case Style::TC:
      for (int k = 1; k <= n; ++k) {
        AdaptedProcess c = conditional_losses(problem, M, k);
        for (NodeIndex i : t.nodes_at(k - 1))
          fail(c[i] - problem.alpha(k), "conditional constraint at node '" + t.id(i) + "'");
      }
      break;
    case Style::LB:
      fail(lookback_excess(problem, M), "lookback constraint");
      break;
    case Style::CVAR:
      for (int k = 1; k <= n; ++k)
        fail(cvar_shortfall(problem, M, k) - problem.alpha(k),
             "CVaR constraint at date " + std::to_string(k));
      break;
  }
  return r;
}

}  // namespace alm
