#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

namespace alm::experiment {

/// Two-date lognormal model: S_k = S0 exp(sigma W_k - sigma^2/2) with
/// corr(W_1, W_2) = rho, P = Q, call loss.
struct LognormalModel {
  double S0 = 100.0;
  double sigma = 0.2;
  double rho = 0.5;
  double alpha1 = 5.0;
  std::vector<double> alpha2_grid;
  std::size_t samples = 1'000'000;  // 0 disables Monte Carlo
  std::size_t quadrature_nodes = 64;
  std::uint64_t seed = 0;

  /// Throws InvalidInput on S0, sigma <= 0, |rho| >= 1, negative
  /// tolerances or fewer than 8 quadrature nodes.
  void validate() const;
};

/// 40 points from 0.5 to 20.
std::vector<double> default_alpha2_grid();

struct AlmostSureCost {
  double pathwise = 0.0;     // E[S1 v S2]
  double conditional = 0.0;  // E[S1 v E[S2 | F1]]
  double pathwise_mc = 0.0;
  double conditional_mc = 0.0;
  double pathwise_stderr = 0.0;
  double conditional_stderr = 0.0;
};

AlmostSureCost almost_sure_cost(const LognormalModel& model);

/// S0 * 2 Phi(sigma sqrt(2(1 - rho)) / 2).
double pathwise_cost_exact(const LognormalModel& model);
/// S0 * 2 Phi(sigma (1 - rho) / 2).
double conditional_cost_exact(const LognormalModel& model);

struct CurvePoint {
  double alpha2 = 0.0;
  double eu = 0.0, tc = 0.0, lb = 0.0;
  double eu_mc = 0.0, tc_mc = 0.0, lb_mc = 0.0;
  double eu_stderr = 0.0, tc_stderr = 0.0, lb_stderr = 0.0;
};

struct Curves {
  std::vector<CurvePoint> points;
  AlmostSureCost almost_sure;
  bool monte_carlo = false;
};

/// Risk-neutral two-date closed forms integrated over the date-1 factor.
/// With `samples > 0` the same closed forms are also evaluated on a Monte
/// Carlo sample (common random numbers across the grid).
Curves riskneutral_curves(const LognormalModel& model);

/// Header plus one row per grid point, 6 decimals, "nan" for missing MC.
void write_csv(std::ostream& out, const Curves& curves);

}  // namespace alm::experiment
