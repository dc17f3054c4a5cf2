#include <gtest/gtest.h>

#include "alm/linear_program.hpp"

using namespace alm::lp;

TEST(LinearProgram, SmallOptimum) {
  // max 3x + 2y, x + y <= 4, x + 3y <= 6, x <= 3
  LinearProgram p;
  auto x = p.add_variable(-3.0, 0.0, 3.0);
  auto y = p.add_variable(-2.0, 0.0);
  p.add_row({{x, 1}, {y, 1}}, Sense::LessEqual, 4);
  p.add_row({{x, 1}, {y, 3}}, Sense::LessEqual, 6);
  Solution s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -11.0, 1e-12);
  EXPECT_NEAR(s.x[x], 3.0, 1e-12);
  EXPECT_NEAR(s.x[y], 1.0, 1e-12);
  EXPECT_LE(std::abs(s.duality_gap), 1e-10);
  EXPECT_NEAR(s.duals[0], -2.0, 1e-12);
}

TEST(LinearProgram, FreeVariablesAndEqualities) {
  // min |x - 2| + |y + 1| via epigraphs, x + y = 5
  LinearProgram p;
  auto x = p.add_variable(0.0);
  auto y = p.add_variable(0.0);
  auto u = p.add_variable(1.0, 0.0);
  auto v = p.add_variable(1.0, 0.0);
  p.add_row({{u, 1}, {x, -1}}, Sense::GreaterEqual, -2);
  p.add_row({{u, 1}, {x, 1}}, Sense::GreaterEqual, 2);
  p.add_row({{v, 1}, {y, -1}}, Sense::GreaterEqual, 1);
  p.add_row({{v, 1}, {y, 1}}, Sense::GreaterEqual, -1);
  p.add_row({{x, 1}, {y, 1}}, Sense::Equal, 5);
  Solution s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, 4.0, 1e-12);
  EXPECT_LE(s.primal_infeasibility, 1e-12);
}

TEST(LinearProgram, DetectsInfeasibleAndUnbounded) {
  LinearProgram a;
  auto x = a.add_variable(1.0, 0.0);
  a.add_row({{x, 1}}, Sense::LessEqual, -1);
  EXPECT_EQ(solve(a).status, Status::Infeasible);

  LinearProgram b;
  auto y = b.add_variable(1.0);
  b.add_row({{y, 1}}, Sense::LessEqual, 3);
  EXPECT_EQ(solve(b).status, Status::Unbounded);
}

TEST(LinearProgram, DegenerateCycleProne) {
  // Beale's cycling example
  LinearProgram p;
  auto x1 = p.add_variable(-0.75, 0.0);
  auto x2 = p.add_variable(150.0, 0.0);
  auto x3 = p.add_variable(-0.02, 0.0);
  auto x4 = p.add_variable(6.0, 0.0);
  p.add_row({{x1, 0.25}, {x2, -60}, {x3, -0.04}, {x4, 9}}, Sense::LessEqual, 0);
  p.add_row({{x1, 0.5}, {x2, -90}, {x3, -0.02}, {x4, 3}}, Sense::LessEqual, 0);
  p.add_row({{x3, 1}}, Sense::LessEqual, 1);
  Solution s = solve(p);
  ASSERT_EQ(s.status, Status::Optimal);
  EXPECT_NEAR(s.objective, -0.05, 1e-12);
}
