#include "alm/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "alm/errors.hpp"

namespace alm::quad {

namespace {

struct FixedDeleter {
  void operator()(gsl_integration_fixed_workspace* w) const { gsl_integration_fixed_free(w); }
};

Rule fixed_rule(const gsl_integration_fixed_type* type, std::size_t n, double a, double b) {
  if (n == 0) throw InvalidInput("quadrature needs at least one node");
  std::unique_ptr<gsl_integration_fixed_workspace, FixedDeleter> w(
      gsl_integration_fixed_alloc(type, n, a, b, 0.0, 0.0));
  if (!w) throw SolverFailure("quadrature rule allocation failed");
  Rule r;
  r.nodes.assign(gsl_integration_fixed_nodes(w.get()), gsl_integration_fixed_nodes(w.get()) + n);
  r.weights.assign(gsl_integration_fixed_weights(w.get()), gsl_integration_fixed_weights(w.get()) + n);
  return r;
}

}  // namespace

Rule gauss_hermite_normal(std::size_t n) {
  // GSL's Hermite weight is exp(-b (x - a)^2); b = 1/2 gives the normal kernel
  Rule r = fixed_rule(gsl_integration_fixed_hermite, n, 0.0, 0.5);
  double s = 0.0;
  for (double w : r.weights) s += w;
  for (double& w : r.weights) w /= s;
  return r;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
  return fixed_rule(gsl_integration_fixed_legendre, n, a, b);
}

Rule split_normal(std::size_t n, double lo, double hi, std::vector<double> breaks,
                  double max_width) {
  if (!(lo < hi) || !(max_width > 0.0)) throw InvalidInput("bad split quadrature range");
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::erase_if(breaks, [&](double x) { return !(x >= lo && x <= hi); });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  Rule out;
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s], b = breaks[s + 1];
    if (!(b > a)) continue;
    const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    const double h = (b - a) / pieces;
    for (int p = 0; p < pieces; ++p) {
      const double pa = a + p * h;
      const double pb = p + 1 == pieces ? b : pa + h;
      Rule g = gauss_legendre(n, pa, pb);
      for (std::size_t i = 0; i < n; ++i) {
        const double w = g.weights[i] * normal_pdf(g.nodes[i]);
        out.nodes.push_back(g.nodes[i]);
        out.weights.push_back(w);
        total += w;
      }
    }
  }
  for (double& w : out.weights) w /= total;
  return out;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace alm::quad
