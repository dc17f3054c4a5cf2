#pragma once

#include <cstddef>
#include <vector>

namespace alm::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for E[f(Z)], Z ~ N(0,1); weights sum to one.
Rule gauss_hermite_normal(std::size_t n);

/// Gauss-Legendre rule on [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

/// Standard normal measure restricted to [lo, hi], split at `breaks` and into
/// pieces no wider than `max_width`, with n Legendre nodes per piece.
/// Weights are renormalized to sum to one. Integrands that are only piecewise
/// smooth keep spectral accuracy when their kinks are among the breaks.
Rule split_normal(std::size_t n, double lo, double hi, std::vector<double> breaks,
                  double max_width = 2.0);

double normal_cdf(double x);
double normal_pdf(double x);

}  // namespace alm::quad
