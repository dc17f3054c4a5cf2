#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "alm/errors.hpp"
#include "alm/experiment.hpp"
#include "alm/quadrature.hpp"

using namespace alm;
using namespace alm::experiment;

TEST(Quadrature, NormalMoments) {
  quad::Rule r = quad::gauss_hermite_normal(32);
  double m0 = 0, m2 = 0, m4 = 0, ex = 0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double x = r.nodes[i], w = r.weights[i];
    m0 += w, m2 += w * x * x, m4 += w * x * x * x * x, ex += w * std::exp(0.3 * x);
  }
  EXPECT_NEAR(m0, 1.0, 1e-14);
  EXPECT_NEAR(m2, 1.0, 1e-13);
  EXPECT_NEAR(m4, 3.0, 1e-12);
  EXPECT_NEAR(ex, std::exp(0.045), 1e-14);

  quad::Rule s = quad::split_normal(16, -10, 10, {0.15});
  double kink = 0;
  for (std::size_t i = 0; i < s.nodes.size(); ++i) kink += s.weights[i] * std::max(s.nodes[i] - 0.15, 0.0);
  const double exact = quad::normal_pdf(0.15) - 0.15 * (1 - quad::normal_cdf(0.15));
  EXPECT_NEAR(kink, exact, 1e-13);
}

TEST(Experiment, AlmostSureCosts) {
  LognormalModel m;
  m.samples = 200000;
  AlmostSureCost c = almost_sure_cost(m);
  EXPECT_NEAR(c.pathwise, 107.966, 0.01);
  EXPECT_NEAR(c.pathwise, pathwise_cost_exact(m), 0.01);
  EXPECT_NEAR(c.conditional, 200.0 * quad::normal_cdf(0.05), 1e-9);
  EXPECT_NEAR(c.conditional, 103.99, 0.01);
  EXPECT_LE(std::abs(c.pathwise_mc - c.pathwise), 3 * c.pathwise_stderr);
  EXPECT_LE(std::abs(c.conditional_mc - c.conditional), 3 * c.conditional_stderr);
}

TEST(Experiment, NearPerfectCorrelation) {
  LognormalModel m;
  m.rho = 0.999999;
  m.samples = 0;
  // S2 is (almost) S1 so both costs approach E[S1] = S0
  AlmostSureCost c = almost_sure_cost(m);
  EXPECT_NEAR(c.pathwise, pathwise_cost_exact(m), 0.05);
  EXPECT_NEAR(c.pathwise, 100.0, 0.05);
}

TEST(Experiment, CurvesOrderedAndDecreasing) {
  LognormalModel m;
  m.alpha2_grid = default_alpha2_grid();
  m.samples = 0;
  Curves c = riskneutral_curves(m);
  ASSERT_EQ(c.points.size(), 40u);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const CurvePoint& p = c.points[i];
    EXPECT_LE(p.eu, p.tc + 1e-9);
    EXPECT_LE(p.tc, p.lb + 1e-9);
    EXPECT_LT(p.lb, c.almost_sure.pathwise);
    if (i > 0) {
      EXPECT_LE(p.eu, c.points[i - 1].eu + 1e-9);
      EXPECT_LE(p.tc, c.points[i - 1].tc + 1e-9);
      EXPECT_LE(p.lb, c.points[i - 1].lb + 1e-9);
    }
  }
}

TEST(Experiment, LargeSecondToleranceLimit) {
  LognormalModel m;
  m.alpha2_grid = {500.0};
  m.samples = 0;
  Curves c = riskneutral_curves(m);
  EXPECT_NEAR(c.points[0].eu, 95.0, 1e-9);
  EXPECT_NEAR(c.points[0].tc, 95.0, 1e-9);
  EXPECT_NEAR(c.points[0].lb, 95.0, 1e-9);
}

TEST(Experiment, MonteCarloWithinThreeStandardErrors) {
  LognormalModel m;
  m.alpha2_grid = {0.5, 4.0, 12.0};
  m.samples = 200000;
  m.seed = 3;
  Curves c = riskneutral_curves(m);
  for (const CurvePoint& p : c.points) {
    EXPECT_LE(std::abs(p.eu_mc - p.eu), 3 * p.eu_stderr);
    EXPECT_LE(std::abs(p.tc_mc - p.tc), 3 * p.tc_stderr);
    EXPECT_LE(std::abs(p.lb_mc - p.lb), 3 * p.lb_stderr);
  }
}

TEST(Experiment, CsvAndValidation) {
  LognormalModel m;
  m.alpha2_grid = {1.0, 2.0};
  m.samples = 0;
  std::ostringstream os;
  write_csv(os, riskneutral_curves(m));
  std::istringstream in(os.str());
  std::string header, row;
  std::getline(in, header);
  EXPECT_EQ(header,
            "alpha2,v_eu,v_tc,v_lb,v_as_pathwise,v_as_conditional,mc_stderr_eu,mc_stderr_tc,"
            "mc_stderr_lb,mc_stderr_as_pathwise,mc_stderr_as_conditional");
  std::getline(in, row);
  EXPECT_EQ(row.substr(0, 9), "1.000000,");
  EXPECT_NE(row.find(",nan"), std::string::npos);

  m.quadrature_nodes = 7;
  EXPECT_THROW(m.validate(), InvalidInput);
  m.quadrature_nodes = 64;
  m.rho = 1.0;
  EXPECT_THROW(m.validate(), InvalidInput);
}
