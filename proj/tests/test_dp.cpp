#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace alm;
using alm::fx::t1_problem;

TEST(DynamicProgramming, T1Values) {
  HedgeProblem p = t1_problem();
  EXPECT_NEAR(eu_solve_n2(p).v0, 102.0, 1e-9);
  SolveResult tc = tc_solve_riskneutral(p.with_style(Style::TC));
  EXPECT_NEAR(tc.v0, 102.5, 1e-12);
  EXPECT_LE(tc.diagnostics.at("max_form_gap"), 1e-12);
  EXPECT_NEAR(lb_value_n2(p.with_style(Style::LB)).v0, 103.5, 1e-9);
  EXPECT_NEAR(tc_solve_riskneutral(t1_problem({0.0, 0.0}, Style::TC)).v0, 105.0, 1e-12);
  EXPECT_TRUE(check_feasibility(p.with_style(Style::TC), tc.wealth).feasible);
}

TEST(DynamicProgramming, Preconditions) {
  HedgeProblem p = t1_problem();
  EXPECT_THROW(tc_solve_general(p.with_style(Style::TC)), PreconditionError);
  TreeSpec s = p.tree.spec();
  s.nodes[1].q = 0.3;
  s.nodes[2].q = 0.7;
  HedgeProblem skew = HedgeProblem::from_benchmark(ScenarioTree::build(s), p.benchmark, make_call_loss(), {2.0, 1.0});
  EXPECT_THROW(tc_solve_riskneutral(skew), PreconditionError);
  EXPECT_THROW(eu_solve_n2(skew), PreconditionError);
}

TEST(DynamicProgramming, GeneralTimeConsistentMatchesOracle) {
  std::mt19937_64 rng(101);
  for (int i = 0; i < 15; ++i) {
    HedgeProblem p = fx::random_exponential_problem(rng, {1 + i % 3, 2, 3, false}, Style::TC);
    SolveResult r = tc_solve_general(p);
    EXPECT_NEAR(r.v0, solve_oracle(p).v0, 1e-6) << i;
    EXPECT_TRUE(check_feasibility(p, r.wealth, 1e-8).feasible) << i;
  }
}

TEST(DynamicProgramming, RiskNeutralTimeConsistentMatchesOracle) {
  std::mt19937_64 rng(103);
  for (int i = 0; i < 15; ++i) {
    HedgeProblem p = i % 3 ? fx::random_call_problem(rng, {1 + i % 3, 2, 3, true}, Style::TC)
                           : fx::random_exponential_problem(rng, {1 + i % 3, 2, 3, true}, Style::TC);
    SolveResult r = tc_solve_riskneutral(p);
    EXPECT_NEAR(r.v0, solve_oracle(p).v0, p.loss.kind() == LossKind::Call ? 1e-7 : 1e-6) << i;
    EXPECT_TRUE(check_feasibility(p, r.wealth, 1e-8).feasible) << i;
  }
}

TEST(DynamicProgramming, ExponentialRegimes) {
  std::mt19937_64 rng(107);
  int seen[3] = {0, 0, 0};
  for (int i = 0; i < 30; ++i) {
    HedgeProblem p = fx::random_exponential_problem(rng, {2, 2, 3, i % 2 == 0});
    SolveResult r = eu_exponential_n2(p);
    ++seen[static_cast<int>(r.diagnostics.at("regime"))];
    EXPECT_NEAR(r.v0, solve_oracle(p).v0, 1e-6) << i;
    EXPECT_TRUE(check_feasibility(p, r.wealth, 1e-8).feasible) << i;
  }
  for (int k = 0; k < 3; ++k) EXPECT_GT(seen[k], 0) << "regime " << k;
}

TEST(DynamicProgramming, ExponentialRegimeOneFormula) {
  std::mt19937_64 rng(109);
  int hits = 0;
  for (int i = 0; i < 40 && hits < 5; ++i) {
    HedgeProblem p = fx::random_exponential_problem(rng, {2, 2, 3, false});
    SolveResult r = eu_exponential_n2(p);
    if (r.diagnostics.at("regime") != 0.0) continue;
    ++hits;
    const double pe = p.loss.exponent();
    AdaptedProcess z = density_process(p.tree);
    double v = 0.0;
    for (NodeIndex j : p.tree.nodes_at(1))
      v += p.tree.probability(j, Measure::Q) * p.benchmark[j] -
           p.tree.probability(j, Measure::P) * z[j] * std::log(z[j]) / pe;
    v -= std::log1p(p.alpha(1)) / pe;
    EXPECT_NEAR(r.v0, v, 1e-10);
  }
  EXPECT_GT(hits, 0);
}

TEST(DynamicProgramming, ExponentialDegenerateBoundary) {
  // P = Q and S2 = S1: X = 1, both single-constraint formulas coincide
  HedgeProblem base = t1_problem({0.3, 0.3});
  AdaptedProcess S(base.tree, 1, 2);
  for (NodeIndex j : base.tree.nodes_at(1)) S[j] = base.benchmark[j];
  for (NodeIndex j : base.tree.nodes_at(2)) S[j] = base.benchmark[*base.tree.parent(j)];
  for (double a2 : {0.1, 0.3, 0.6}) {
    HedgeProblem p = HedgeProblem::from_benchmark(base.tree, S, make_exponential_loss(0.5), {0.3, a2});
    SolveResult r = eu_exponential_n2(p);
    EXPECT_NEAR(r.v0, 100.0 - std::log1p(std::min(0.3, a2)) / 0.5, 1e-10);
  }
}

TEST(DynamicProgramming, GenericRouteMatchesExponential) {
  std::mt19937_64 rng(113);
  for (int i = 0; i < 8; ++i) {
    HedgeProblem p = fx::random_exponential_problem(rng, {2, 2, 3, i % 2 == 0});
    EXPECT_NEAR(eu_solve_n2_generic(p).v0, eu_exponential_n2(p).v0, 1e-7) << i;
  }
}

TEST(DynamicProgramming, LookbackMatchesOracle) {
  std::mt19937_64 rng(127);
  for (int i = 0; i < 16; ++i) {
    fx::TreeShape sh{2, 2, 3, i % 3 == 0};
    HedgeProblem p = i % 2 ? fx::random_exponential_problem(rng, sh, Style::LB)
                           : fx::random_call_problem(rng, sh, Style::LB);
    SolveResult r = lb_value_n2(p);
    EXPECT_NEAR(r.v0, solve_oracle(p).v0, 1e-6) << i;
    EXPECT_TRUE(check_feasibility(p, r.wealth, 1e-8).feasible) << i;
  }
}

TEST(DynamicProgramming, LargeSecondToleranceLeavesFirstConstraint) {
  HedgeProblem p = t1_problem({2.0, 1e6});
  EXPECT_NEAR(eu_solve_n2(p).v0, 100.0 - 2.0, 1e-6);
  EXPECT_NEAR(lb_value_n2(t1_problem({1e6, 1.0}, Style::LB)).v0, 102.0 - 1.0, 1e-6);
}
