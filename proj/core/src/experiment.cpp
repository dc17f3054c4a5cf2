#include "alm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "alm/closed_form.hpp"
#include "alm/errors.hpp"
#include "alm/quadrature.hpp"

namespace alm::experiment {

namespace {

constexpr double kRange = 10.0;  // date-1 factor integrated over [-10, 10]

struct Factor {
  double s1(double z) const { return m.S0 * std::exp(m.sigma * z - 0.5 * m.sigma * m.sigma); }
  // E[S2 | F1]
  double c(double z) const {
    const double sr = m.sigma * m.rho;
    return m.S0 * std::exp(sr * z - 0.5 * sr * sr);
  }
  double s2(double z, double e) const {
    const double w = m.rho * z + std::sqrt(1.0 - m.rho * m.rho) * e;
    return m.S0 * std::exp(m.sigma * w - 0.5 * m.sigma * m.sigma);
  }
  const LognormalModel& m;
};

// Roots of s1(z) - c(z) = level on [-kRange, kRange].
std::vector<double> crossings(const Factor& f, double level) {
  std::vector<double> out;
  auto g = [&](double z) { return f.s1(z) - f.c(z) - level; };
  const int steps = 4000;
  const double h = 2.0 * kRange / steps;
  for (int i = 0; i < steps; ++i) {
    double a = -kRange + i * h, b = a + h;
    double ga = g(a), gb = g(b);
    if (ga == 0.0) out.push_back(a);
    if (ga * gb >= 0.0) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      const double gm = g(mid);
      if ((gm < 0.0) == (ga < 0.0)) {
        a = mid, ga = gm;
      } else {
        b = mid;
      }
    }
    out.push_back(0.5 * (a + b));
  }
  return out;
}

struct Sample {
  double mean = 0.0, stderr_ = 0.0;
};

Sample summarize(const std::vector<double>& v) {
  Sample s;
  const double n = static_cast<double>(v.size());
  for (double x : v) s.mean += x;
  s.mean /= n;
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  return s;
}

// Standard error of the term that sets the two-objective value.
double two_objective_stderr(const std::vector<double>& X, const std::vector<double>& Y,
                            double a, double b) {
  const std::size_t n = X.size();
  std::vector<double> tx(n), ty(n), tm(n);
  for (std::size_t i = 0; i < n; ++i) {
    tx[i] = X[i];
    ty[i] = Y[i];
    tm[i] = std::max(X[i], Y[i]);
  }
  const Sample sx = summarize(tx), sy = summarize(ty), sm = summarize(tm);
  const double t1 = sx.mean - a, t2 = sy.mean - b, t3 = sm.mean - a - b;
  if (t3 >= t1 && t3 >= t2) return sm.stderr_;
  return t1 >= t2 ? sx.stderr_ : sy.stderr_;
}

}  // namespace

void LognormalModel::validate() const {
  if (!(S0 > 0.0)) throw InvalidInput("S0 must be positive");
  if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
  if (!(std::abs(rho) < 1.0)) throw InvalidInput("rho must lie in (-1, 1)");
  if (!(alpha1 >= 0.0)) throw InvalidInput("alpha1 must be non-negative");
  for (double a : alpha2_grid)
    if (!(a >= 0.0)) throw InvalidInput("alpha2 grid values must be non-negative");
  if (quadrature_nodes < 8) throw InvalidInput("quadrature needs at least 8 nodes");
}

std::vector<double> default_alpha2_grid() {
  std::vector<double> g;
  for (int i = 0; i < 40; ++i) g.push_back(0.5 + 19.5 * i / 39.0);
  return g;
}

double pathwise_cost_exact(const LognormalModel& m) {
  return m.S0 * 2.0 * quad::normal_cdf(m.sigma * std::sqrt(2.0 * (1.0 - m.rho)) / 2.0);
}

double conditional_cost_exact(const LognormalModel& m) {
  return m.S0 * 2.0 * quad::normal_cdf(m.sigma * (1.0 - m.rho) / 2.0);
}

AlmostSureCost almost_sure_cost(const LognormalModel& model) {
  model.validate();
  const Factor f{model};
  AlmostSureCost out;

  const quad::Rule gh = quad::gauss_hermite_normal(model.quadrature_nodes);
  for (std::size_t i = 0; i < gh.nodes.size(); ++i)
    for (std::size_t j = 0; j < gh.nodes.size(); ++j)
      out.pathwise += gh.weights[i] * gh.weights[j] *
                      std::max(f.s1(gh.nodes[i]), f.s2(gh.nodes[i], gh.nodes[j]));

  // one factor only; split at the crossing so the kink does not cost accuracy
  const quad::Rule sn = quad::split_normal(model.quadrature_nodes, -kRange, kRange, crossings(f, 0.0));
  for (std::size_t i = 0; i < sn.nodes.size(); ++i)
    out.conditional += sn.weights[i] * std::max(f.s1(sn.nodes[i]), f.c(sn.nodes[i]));

  if (model.samples > 1) {
    std::mt19937_64 rng(model.seed);
    std::normal_distribution<double> normal;
    std::vector<double> path(model.samples), cond(model.samples);
    for (std::size_t s = 0; s < model.samples; ++s) {
      const double z = normal(rng), e = normal(rng);
      path[s] = std::max(f.s1(z), f.s2(z, e));
      cond[s] = std::max(f.s1(z), f.c(z));
    }
    const Sample p = summarize(path), c = summarize(cond);
    out.pathwise_mc = p.mean;
    out.pathwise_stderr = p.stderr_;
    out.conditional_mc = c.mean;
    out.conditional_stderr = c.stderr_;
  }
  return out;
}

Curves riskneutral_curves(const LognormalModel& model) {
  model.validate();
  const Factor f{model};
  Curves out;
  out.almost_sure = almost_sure_cost(model);
  out.monte_carlo = model.samples > 1;
  const double a1 = model.alpha1;

  std::vector<double> mx, my;
  if (out.monte_carlo) {
    std::mt19937_64 rng(model.seed);
    std::normal_distribution<double> normal;
    mx.resize(model.samples);
    my.resize(model.samples);
    for (std::size_t s = 0; s < model.samples; ++s) {
      const double z = normal(rng);
      normal(rng);  // keep the stream aligned with almost_sure_cost
      mx[s] = f.s1(z);
      my[s] = f.c(z);
    }
  }
  const std::vector<double> mprob(mx.size(), mx.empty() ? 0.0 : 1.0 / static_cast<double>(mx.size()));

  for (double a2 : model.alpha2_grid) {
    std::vector<double> breaks;
    for (double level : {0.0, -a2, a1 - a2}) {
      auto r = crossings(f, level);
      breaks.insert(breaks.end(), r.begin(), r.end());
    }
    const quad::Rule rule = quad::split_normal(model.quadrature_nodes, -kRange, kRange, breaks);
    std::vector<double> X(rule.nodes.size()), Y(rule.nodes.size()), Ym(rule.nodes.size());
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      X[i] = f.s1(rule.nodes[i]);
      Y[i] = f.c(rule.nodes[i]);
      Ym[i] = Y[i] - a2;
    }
    CurvePoint pt;
    pt.alpha2 = a2;
    pt.eu = two_objective_value(X, Y, rule.weights, a1, a2).value;
    pt.tc = two_objective_value(X, Ym, rule.weights, a1, 0.0).value;
    pt.lb = two_objective_lookback(X, Y, rule.weights, a1, a2).value;

    if (out.monte_carlo) {
      std::vector<double> mym(my.size());
      for (std::size_t s = 0; s < my.size(); ++s) mym[s] = my[s] - a2;
      pt.eu_mc = two_objective_value(mx, my, mprob, a1, a2).value;
      pt.eu_stderr = two_objective_stderr(mx, my, a1, a2);
      pt.tc_mc = two_objective_value(mx, mym, mprob, a1, 0.0).value;
      pt.tc_stderr = two_objective_stderr(mx, mym, a1, 0.0);
      const ClosedFormResult lb = two_objective_lookback(mx, my, mprob, a1, a2);
      pt.lb_mc = lb.value;
      pt.lb_stderr = summarize(lb.witness).stderr_;
    }
    out.points.push_back(pt);
  }
  return out;
}

void write_csv(std::ostream& out, const Curves& c) {
  out << "alpha2,v_eu,v_tc,v_lb,v_as_pathwise,v_as_conditional,mc_stderr_eu,mc_stderr_tc,"
         "mc_stderr_lb,mc_stderr_as_pathwise,mc_stderr_as_conditional\n";
  auto num = [](double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return std::string(buf);
  };
  auto mc = [&](double x) { return c.monte_carlo ? num(x) : std::string("nan"); };
  for (const CurvePoint& p : c.points) {
    out << num(p.alpha2) << ',' << num(p.eu) << ',' << num(p.tc) << ',' << num(p.lb) << ','
        << num(c.almost_sure.pathwise) << ',' << num(c.almost_sure.conditional) << ','
        << mc(p.eu_stderr) << ',' << mc(p.tc_stderr) << ',' << mc(p.lb_stderr) << ','
        << mc(c.almost_sure.pathwise_stderr) << ',' << mc(c.almost_sure.conditional_stderr)
        << '\n';
  }
}

}  // namespace alm::experiment
