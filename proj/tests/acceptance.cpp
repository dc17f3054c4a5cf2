// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "fixtures.hpp"

using namespace alm;
using namespace alm::fx;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("CRITERION %d: %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

// Runs `body`, turning any exception into a failure line.
void criterion(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

double mean(const std::vector<double>& v, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += p[i] * v[i];
  return s;
}

double shortfall(const std::vector<double>& x, const std::vector<double>& m, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += p[i] * std::max(x[i] - m[i], 0.0);
  return s;
}

void figure_replication() {
  const auto t0 = std::chrono::steady_clock::now();
  experiment::LognormalModel m;  // S0 = 100, sigma = 0.2, rho = 0.5, alpha1 = 5
  m.samples = 1'000'000;
  const experiment::AlmostSureCost c = experiment::almost_sure_cost(m);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = std::abs(c.pathwise - 107.966) <= 0.01 && std::abs(c.pathwise_mc - 107.966) <= 0.3 && secs < 60.0;
  report(1, ok, fmt("quadrature %.6f, MC %.6f (se %.4f), %.1fs", c.pathwise, c.pathwise_mc, c.pathwise_stderr, secs));
}

void figure_shape() {
  experiment::LognormalModel m;
  m.alpha2_grid = experiment::default_alpha2_grid();
  m.samples = 0;
  const experiment::Curves c = experiment::riskneutral_curves(m);
  int bad_order = 0, bad_mono = 0, above = 0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    bad_order += !(p.eu <= p.tc + 1e-9 && p.tc <= p.lb + 1e-9);
    above += !(std::max({p.eu, p.tc, p.lb}) < 107.966);
    if (i > 0) {
      const auto& q = c.points[i - 1];
      bad_mono += !(p.eu <= q.eu + 1e-9 && p.tc <= q.tc + 1e-9 && p.lb <= q.lb + 1e-9);
    }
  }
  report(2, bad_order == 0 && bad_mono == 0 && above == 0 && c.points.size() == 40,
         fmt("%zu grid points: %d ordering, %d monotonicity, %d above 107.966", c.points.size(), bad_order,
             bad_mono, above));
}

void fixture_t1() {
  const HedgeProblem p = t1_problem();
  const double want[] = {102.0, 102.5, 103.5};
  const RiskNeutralTriple cf = riskneutral_n2(p);
  const double closed[] = {cf.eu.value, cf.tc.value, cf.lb.value};
  const double dp[] = {eu_solve_n2(p).v0, tc_solve_riskneutral(p.with_style(Style::TC)).v0,
                       lb_value_n2(p.with_style(Style::LB)).v0};
  double worst = 0.0;
  std::string line;
  int k = 0;
  for (Style s : {Style::EU, Style::TC, Style::LB}) {
    const double oracle = solve_oracle(p.with_style(s)).v0;
    worst = std::max({worst, std::abs(oracle - want[k]), std::abs(closed[k] - want[k]), std::abs(dp[k] - want[k])});
    line += fmt("%s oracle %.9f closed %.9f dp %.9f; ", to_string(s).c_str(), oracle, closed[k], dp[k]);
    ++k;
  }
  report(3, worst <= 1e-7, line + fmt("worst deviation %.2e", worst));
}

void inclusion_ordering() {
  std::mt19937_64 rng(20241);
  std::uniform_int_distribution<int> dates(1, 3), branch(1, 3), coin(0, 1);
  int violations = 0;
  double worst = -INFINITY;
  for (int i = 0; i < 100; ++i) {
    TreeShape sh{dates(rng), 1, branch(rng), coin(rng) == 1};
    sh.min_branch = std::min(2, sh.max_branch);
    const HedgeProblem p = coin(rng) ? random_call_problem(rng, sh) : random_exponential_problem(rng, sh);
    const OrderingReport o = verify_inclusion_ordering(p, 1e-7, false);
    violations += !o.ordered;
    worst = std::max(worst, o.worst);
  }
  report(4, violations == 0, fmt("100 instances, %d violations, worst max(eu-tc, tc-lb) %.2e", violations, worst));
}

void recursion_equivalence() {
  std::mt19937_64 rng(777);
  std::uniform_int_distribution<int> dates(1, 3);
  double w_general = 0, w_rn = 0, w_exp = 0, w_lb = 0;
  int regimes[3] = {0, 0, 0};
  for (int i = 0; i < 50; ++i) {
    const HedgeProblem p = random_exponential_problem(rng, {dates(rng), 2, 3, false}, Style::TC);
    w_general = std::max(w_general, std::abs(tc_solve_general(p).v0 - solve_oracle(p).v0));
  }
  for (int i = 0; i < 50; ++i) {
    const HedgeProblem p = random_call_problem(rng, {dates(rng), 2, 3, true}, Style::TC);
    w_rn = std::max(w_rn, std::abs(tc_solve_riskneutral(p).v0 - solve_oracle(p).v0));
  }
  for (int i = 0; i < 40; ++i) {
    const HedgeProblem p = random_exponential_problem(rng, {2, 2, 3, i % 2 == 0});
    const SolveResult r = eu_exponential_n2(p);
    ++regimes[static_cast<int>(r.diagnostics.at("regime"))];
    w_exp = std::max(w_exp, std::abs(r.v0 - solve_oracle(p).v0));
  }
  for (int i = 0; i < 40; ++i) {
    const TreeShape sh{2, 2, 3, i % 3 == 0};
    const HedgeProblem p = i % 2 ? random_exponential_problem(rng, sh, Style::LB) : random_call_problem(rng, sh, Style::LB);
    w_lb = std::max(w_lb, std::abs(lb_value_n2(p).v0 - solve_oracle(p).v0));
  }
  const bool ok = w_general <= 1e-6 && w_rn <= 1e-7 && w_exp <= 1e-6 && w_lb <= 1e-6 && regimes[0] > 0 &&
                  regimes[1] > 0 && regimes[2] > 0;
  report(5, ok,
         fmt("TC general (50) %.2e, TC risk-neutral call (50) %.2e, EU exponential (40; regimes %d/%d/%d) %.2e, "
             "LB (40) %.2e",
             w_general, w_rn, regimes[0], regimes[1], regimes[2], w_exp, w_lb));
}

void single_date() {
  std::mt19937_64 rng(4242);
  double spread = 0, cf_gap = 0;
  int part1 = 0, part2 = 0;
  for (int i = 0; i < 40; ++i) {
    const bool rn = i % 2 == 0;
    const TreeShape sh{1, 2, 4, rn};
    HedgeProblem p = (rn && i % 4 == 0) ? random_call_problem(rng, sh) : random_exponential_problem(rng, sh);
    double v[3];
    int k = 0;
    for (Style s : {Style::EU, Style::TC, Style::LB}) v[k++] = solve_oracle(p.with_style(s)).v0;
    spread = std::max({spread, std::abs(v[0] - v[1]), std::abs(v[1] - v[2])});
    if (rn) {
      cf_gap = std::max(cf_gap, std::abs(n1_value(p, 2).value - v[0]));
      ++part2;
    }
    if (p.loss.satisfies_inada()) {
      cf_gap = std::max(cf_gap, std::abs(n1_value(p, 1).value - v[0]));
      ++part1;
    }
  }
  report(6, spread <= 1e-8 && cf_gap <= 1e-8 && part1 >= 30 && part2 >= 20,
         fmt("40 instances: style spread %.2e, closed-form gap %.2e (multiplier form %d, cushion form %d)", spread,
             cf_gap, part1, part2));
}

void stopping_times() {
  std::mt19937_64 rng(99);
  int disagree = 0, violated = 0;
  std::size_t pairs = 0;
  for (int i = 0; i < 50; ++i) {
    const TreeShape sh{1 + i % 3, 1, 2, i % 2 == 0};
    const HedgeProblem p = i % 3 ? random_call_problem(rng, sh, Style::TC) : random_exponential_problem(rng, sh, Style::TC);
    std::normal_distribution<double> noise(0.0, 2.0);
    AdaptedProcess M(p.tree, 0, p.dates());
    for (NodeIndex j = 0; j < p.tree.size(); ++j) M[j] = p.benchmark[j] + noise(rng) + 0.5;
    const AmericanCheck a = check_american_equivalence(p, M, 0.0);
    const ConditionalCheck c = check_conditional_constraints(p, M, 0.0);
    disagree += a.holds != c.holds;
    violated += !c.holds;
    pairs += a.pairs;
  }
  report(7, disagree == 0, fmt("50 trees, %d disagreements (%d violating M, %zu stopping-time pairs)", disagree,
                               violated, pairs));
}

void appendix_witnesses() {
  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<int> atoms(1, 8);
  std::uniform_real_distribution<double> val(-5, 5), tol(0.0, 4.0), lvl(0.05, 0.95);
  double a1_feas = 0, a1_val = 0, a2_feas = 0, a2_val = 0;
  for (int i = 0; i < 100; ++i) {
    const int m = atoms(rng);
    std::vector<double> X(m), Y(m), p = random_simplex(rng, m);
    for (int j = 0; j < m; ++j) X[j] = val(rng), Y[j] = val(rng);
    const double a = i % 9 == 0 ? 0.0 : tol(rng), b = i % 13 == 0 ? 0.0 : tol(rng);
    const ClosedFormResult r = two_objective_value(X, Y, p, a, b);
    a1_feas = std::max({a1_feas, shortfall(X, r.witness, p) - a, shortfall(Y, r.witness, p) - b});
    a1_val = std::max(a1_val, std::abs(mean(r.witness, p) - r.value));
  }
  for (int i = 0; i < 100; ++i) {
    const int m = atoms(rng), n = 1 + i % 4;
    std::vector<double> p = random_simplex(rng, m);
    std::vector<std::vector<double>> Z(n, std::vector<double>(m));
    for (int j = 0; j < m; ++j) {
      std::vector<double> col(n);
      for (double& x : col) x = val(rng);
      std::sort(col.begin(), col.end());
      for (int k = 0; k < n; ++k) Z[k][j] = col[k];
    }
    std::vector<double> a(n);
    for (double& x : a) x = tol(rng);
    if (i % 5 == 0) a.back() = 0.0;
    const ClosedFormResult r = ordered_objectives_value(Z, p, a);
    for (int k = 0; k < n; ++k) a2_feas = std::max(a2_feas, shortfall(Z[k], r.witness, p) - a[k]);
    a2_val = std::max(a2_val, std::abs(mean(r.witness, p) - r.value));
  }
  double cvar_gap = 0, inc_gap = 0;
  int cvar_n = 0, inc_n = 0;
  for (int i = 0; i < 20; ++i) {
    HedgeProblem p = random_call_problem(rng, {1 + i % 2, 2, 3, i % 3 != 0}, Style::CVAR);
    p.cvar_level = lvl(rng);
    cvar_gap = std::max(cvar_gap, std::abs(cvar_minimize_G(p).value - solve_oracle(p).v0));
    ++cvar_n;
  }
  for (int i = 0; i < 20; ++i) {
    const ScenarioTree t = random_tree(rng, {1 + i % 2, 2, 3, true});
    std::uniform_real_distribution<double> up(0.0, 5.0);
    AdaptedProcess S(t, 1, t.dates());
    std::vector<double> alphas;
    for (int k = 1; k <= t.dates(); ++k) alphas.push_back(tol(rng));
    for (NodeIndex j : t.nodes_at(1)) S[j] = 3.0 * up(rng) + alphas[0];
    for (int k = 2; k <= t.dates(); ++k)
      for (NodeIndex j : t.nodes_at(k)) S[j] = S[*t.parent(j)] - alphas[k - 2] + alphas[k - 1] + up(rng);
    HedgeProblem p = HedgeProblem::from_benchmark(t, S, make_call_loss(), alphas, Style::CVAR, lvl(rng));
    double target = -alphas.back();
    for (NodeIndex j : t.leaves()) target += t.probability(j, Measure::P) * S[j];
    inc_gap = std::max({inc_gap, std::abs(cvar_minimize_G(p).value - target), std::abs(solve_oracle(p).v0 - target)});
    ++inc_n;
  }
  const bool ok = a1_feas <= 1e-8 && a1_val <= 1e-9 && a2_feas <= 1e-8 && a2_val <= 1e-9 && cvar_gap <= 1e-5 &&
                  inc_gap <= 1e-9;
  report(8, ok,
         fmt("two-objective (100): excess %.1e, value %.1e; ordered (100): excess %.1e, value %.1e; "
             "CVaR reduction (%d) %.1e; increasing case (%d) %.1e",
             a1_feas, a1_val, a2_feas, a2_val, cvar_n, cvar_gap, inc_n, inc_gap));
}

}  // namespace

int main() {
  criterion(1, figure_replication);
  criterion(2, figure_shape);
  criterion(3, fixture_t1);
  criterion(4, inclusion_ordering);
  criterion(5, recursion_equivalence);
  criterion(6, single_date);
  criterion(7, stopping_times);
  criterion(8, appendix_witnesses);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
