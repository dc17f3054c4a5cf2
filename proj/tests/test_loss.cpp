#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace alm;

namespace {

// inf_v l(v) - u v on a wide grid
double grid_legendre(const LossFunction& l, double u) {
  double best = INFINITY;
  for (int i = -40000; i <= 40000; ++i) {
    const double v = i * 1e-3;
    best = std::min(best, l(v) - u * v);
  }
  return best;
}

}  // namespace

TEST(Loss, CallPieces) {
  LossFunction l = make_call_loss();
  EXPECT_DOUBLE_EQ(l(-3.0), 3.0);
  EXPECT_DOUBLE_EQ(l(2.0), 0.0);
  EXPECT_DOUBLE_EQ(l.generalized_inverse(5.0), -5.0);
  EXPECT_DOUBLE_EQ(l.derivative(0.0), -1.0);
  EXPECT_DOUBLE_EQ(l.derivative(0.5), 0.0);
  for (double u : {-1.0, -0.5, 0.0}) {
    EXPECT_DOUBLE_EQ(l.legendre(u), 0.0);
    EXPECT_NEAR(grid_legendre(l, u), 0.0, 1e-9);
  }
  EXPECT_EQ(l.legendre(-1.5), -INFINITY);
  EXPECT_EQ(l.legendre(0.5), -INFINITY);
  EXPECT_FALSE(l.satisfies_inada());
  EXPECT_THROW(l.inverse_derivative(-0.5), PreconditionError);
  EXPECT_THROW(l.generalized_inverse(-0.1), PreconditionError);
  EXPECT_TRUE(looks_convex_decreasing(l, -10, 10));
}

TEST(Loss, ExponentialPieces) {
  LossFunction l = make_exponential_loss(1.0);
  EXPECT_NEAR(l.inverse_derivative(-1.0), 0.0, 1e-15);
  EXPECT_NEAR(l(l.inverse_derivative(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(l(l.inverse_derivative(-2.0)), 1.0, 1e-14);
  EXPECT_NEAR(make_exponential_loss(2.0).generalized_inverse(0.0), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(l.inf_limit(), -1.0);
  EXPECT_TRUE(l.satisfies_inada());
  for (double y : {-0.1, -1.0, -7.0}) EXPECT_NEAR(l.derivative(l.inverse_derivative(y)), y, 1e-12);
  for (double u : {-3.0, -1.0, -0.2}) EXPECT_NEAR(l.legendre(u), grid_legendre(l, u), 1e-5);
  EXPECT_THROW(l.generalized_inverse(-1.0), PreconditionError);
  EXPECT_THROW(make_exponential_loss(0.0), InvalidInput);
  EXPECT_TRUE(looks_convex_decreasing(l, -5, 5));
}

TEST(Loss, CustomFallsBackToBisection) {
  CustomLossPieces c;
  c.name = "exp2";
  c.eval = [](double x) { return std::expm1(-2.0 * x); };
  c.inf_limit = -1.0;
  LossFunction l = make_custom_loss(c);
  LossFunction ref = make_exponential_loss(2.0);
  for (double a : {-0.9, -0.3, 0.0, 0.7, 20.0})
    EXPECT_NEAR(l.generalized_inverse(a), ref.generalized_inverse(a), 1e-10);
  EXPECT_THROW(l.derivative(0.0), PreconditionError);
  EXPECT_THROW(l.generalized_inverse(-1.0), PreconditionError);

  CustomLossPieces bumpy;
  bumpy.eval = [](double x) { return std::sin(x); };
  EXPECT_FALSE(looks_convex_decreasing(make_custom_loss(bumpy), -3, 3));
}

TEST(Loss, LambdaWithoutMeasureChange) {
  LossFunction l = make_exponential_loss(0.7);
  const double alpha = 0.3;
  double lam = solve_lambda_at(l, {0.5, 0.5}, {1.0, 1.0}, {-INFINITY, -INFINITY}, alpha);
  EXPECT_NEAR(lam, -0.7 * (1.0 + alpha), 1e-10);
}

TEST(Loss, LambdaResidualUnderMeasureChange) {
  HedgeProblem p = fx::t1_problem();
  TreeSpec s = p.tree.spec();
  const double q[] = {0.0, 0.4, 0.6, 0.3, 0.7, 0.55, 0.45};
  for (std::size_t i = 1; i < s.nodes.size(); ++i) s.nodes[i].q = q[p.tree.index_of(s.nodes[i].id)];
  ScenarioTree t = ScenarioTree::build(s);
  LossFunction l = make_exponential_loss(1.0);

  AdaptedProcess floor(t, 2, 2);
  for (NodeIndex i : t.nodes_at(2)) floor[i] = -0.2 * static_cast<double>(i % 3);
  const double alpha = 0.1;
  LambdaSolution sol = solve_lambda(t, l, 2, floor, alpha);
  for (NodeIndex i : t.nodes_at(1)) {
    double lhs = 0.0, floor_loss = 0.0;
    for (NodeIndex c : t.children(i)) {
      const double r = t.transition(c, Measure::Q) / t.transition(c, Measure::P);
      floor_loss += t.transition(c, Measure::P) * l(floor[c]);
      if (sol.binding[i])
        lhs += t.transition(c, Measure::P) * l(std::max(l.inverse_derivative(sol.lambda[i] * r), floor[c]));
    }
    if (sol.binding[i])
      EXPECT_LE(std::abs(lhs - alpha), 1e-10);
    else
      EXPECT_LE(floor_loss, alpha);
  }

  // a floor that already meets the tolerance switches the node off
  AdaptedProcess easy(t, 2, 2, 5.0);
  LambdaSolution off = solve_lambda(t, l, 2, easy, alpha);
  for (NodeIndex i : t.nodes_at(1)) EXPECT_FALSE(off.binding[i]);
}

TEST(Loss, LambdaRejectsUnattainableTolerance) {
  LossFunction l = make_exponential_loss(1.0);
  EXPECT_THROW(solve_lambda_at(l, {1.0}, {1.0}, {-INFINITY}, -1.0), Infeasible);
  const ScenarioTree& t = fx::t1_problem().tree;
  EXPECT_THROW(solve_lambda(t, make_call_loss(), 2, std::nullopt, 1.0), PreconditionError);
}

TEST(Loss, LevelSolver) {
  LossFunction l = make_call_loss();
  // shortfalls (-4, 2): smallest c with E[l(c v f)] <= 1
  const double c = solve_level_at(l, {0.5, 0.5}, {-4.0, 2.0}, 1.0);
  EXPECT_NEAR(c, -2.0, 1e-12);
  EXPECT_NEAR(0.5 * l(std::max(c, -4.0)) + 0.5 * l(std::max(c, 2.0)), 1.0, 1e-12);
}
