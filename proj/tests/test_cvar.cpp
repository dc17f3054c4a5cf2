#include <gtest/gtest.h>

#include <algorithm>

#include "fixtures.hpp"

using namespace alm;

TEST(Cvar, AtomFormulas) {
  std::vector<double> x{1.0, 4.0, -2.0}, p{0.2, 0.3, 0.5};
  EXPECT_NEAR(cvar_of(x, p, 0.0), 0.2 - 1.0 + 1.2, 1e-12);
  EXPECT_NEAR(cvar_of({0.0, 10.0}, {0.5, 0.5}, 0.5), 10.0, 1e-12);
  EXPECT_NEAR(cvar_of({3.0, 3.0}, {0.4, 0.6}, 0.9), 3.0, 1e-12);
  EXPECT_THROW(cvar_of(x, p, 1.0), InvalidInput);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> v(-10, 10), lv(0.0, 0.99);
  for (int i = 0; i < 30; ++i) {
    std::vector<double> val(6), pr = fx::random_simplex(rng, 6);
    for (double& a : val) a = v(rng);
    const double level = lv(rng);
    EXPECT_NEAR(cvar_of(val, pr, level), cvar_of_dual(val, pr, level), 1e-9);
    EXPECT_GE(cvar_of(val, pr, level) + 1e-12, cvar_of(val, pr, 0.0));
  }
}

TEST(Cvar, BoxCornerIsAlmostSureHedge) {
  HedgeProblem p = fx::t1_problem({2.0, 1.0}, Style::CVAR);
  p.cvar_level = 0.5;
  // z = alpha: E[(S_k - M_k - alpha_k)^+] <= 0 is an a.s. hedge of S_k - alpha_k
  const double g = cvar_reduction_G(p, {2.0, 1.0});
  AdaptedProcess shifted(p.tree, 1, 2);
  for (int k = 1; k <= 2; ++k)
    for (NodeIndex i : p.tree.nodes_at(k)) shifted[i] = p.benchmark[i] - p.alpha(k);
  HedgeProblem hedged = HedgeProblem::from_benchmark(p.tree, shifted, make_call_loss(), {0.0, 0.0});
  EXPECT_NEAR(g, solve_oracle(hedged).v0, 1e-9);
}

TEST(Cvar, ReductionMatchesOracle) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lv(0.1, 0.9);
  for (int i = 0; i < 12; ++i) {
    fx::TreeShape sh{1 + i % 2, 2, 3, i % 3 != 0};
    HedgeProblem p = fx::random_call_problem(rng, sh, Style::CVAR);
    p.cvar_level = lv(rng);
    const double oracle = solve_oracle(p).v0;
    CvarBoxResult box = cvar_minimize_G(p);
    EXPECT_NEAR(box.value, oracle, 1e-5) << i;
    double lower = -INFINITY;
    for (int k = 1; k <= p.dates(); ++k) {
      double e = 0.0;
      for (NodeIndex j : p.tree.nodes_at(k)) e += p.tree.probability(j, Measure::Q) * p.benchmark[j];
      lower = std::max(lower, e - p.alpha(k));
    }
    if (p.tree.risk_neutral()) EXPECT_GE(oracle, lower - 1e-9) << i;
  }
}

TEST(Cvar, IncreasingBenchmark) {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 8; ++i) {
    ScenarioTree t = fx::random_tree(rng, {2, 2, 3, true});
    std::uniform_real_distribution<double> up(0.0, 5.0);
    AdaptedProcess S(t, 1, 2);
    for (NodeIndex j : t.nodes_at(1)) S[j] = 3.0 * up(rng);
    for (NodeIndex j : t.nodes_at(2)) S[j] = S[*t.parent(j)] + up(rng) + 1.0;
    HedgeProblem p = HedgeProblem::from_benchmark(t, S, make_call_loss(), {1.0, 1.0}, Style::CVAR, 0.7);
    ClosedFormResult r = cvar_increasing_value(p);
    EXPECT_NEAR(r.value, solve_oracle(p).v0, 1e-9);
    EXPECT_NEAR(r.value, cvar_minimize_G(p).value, 1e-9);
  }
}
