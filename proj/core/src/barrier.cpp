#include "alm/barrier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "alm/errors.hpp"

namespace alm::convex {

std::string to_string(BarrierStatus s) {
  switch (s) {
    case BarrierStatus::Optimal: return "optimal";
    case BarrierStatus::Unbounded: return "unbounded";
    case BarrierStatus::NotStrictlyFeasible: return "start not strictly feasible";
    case BarrierStatus::Stalled: return "stalled";
  }
  return "?";
}

namespace {

double row_value(const lp::Row& r, const std::vector<double>& x) {
  double v = -r.rhs;
  for (const lp::Term& t : r.terms) v += t.coef * x[t.var];
  return v;
}

double smooth_value(const SmoothConstraint& g, const std::vector<double>& x) {
  double v = -g.rhs;
  for (const SmoothTerm& t : g.terms) v += t.weight * (t.own ? t.own : g.phi)->f(x[t.var] - t.shift);
  for (const lp::Term& t : g.linear) v += t.coef * x[t.var];
  return v;
}

bool strictly_feasible(const ConvexProgram& p, const std::vector<double>& x) {
  for (const auto& r : p.rows)
    if (!(row_value(r, x) < 0.0)) return false;
  for (const auto& g : p.smooth)
    if (!(smooth_value(g, x) < 0.0)) return false;
  return true;
}

double barrier_value(const ConvexProgram& p, const std::vector<double>& x, double t) {
  double v = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) v += t * p.cost[j] * x[j];
  for (const auto& r : p.rows) v -= std::log(-row_value(r, x));
  for (const auto& g : p.smooth) v -= std::log(-smooth_value(g, x));
  return v;
}

}  // namespace

double max_violation(const ConvexProgram& program, const std::vector<double>& x) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : program.rows) worst = std::max(worst, row_value(r, x));
  for (const auto& g : program.smooth) worst = std::max(worst, smooth_value(g, x));
  return worst;
}

BarrierResult minimize(const ConvexProgram& program, std::vector<double> x,
                       const BarrierOptions& options) {
  const std::size_t n = program.cost.size();
  if (x.size() != n) throw InvalidInput("barrier: start has wrong dimension");
  for (const auto& r : program.rows)
    if (r.sense != lp::Sense::LessEqual) throw InvalidInput("barrier: only <= rows supported");
  for (const auto& g : program.smooth)
    for (const auto& term : g.terms)
      if (!g.phi && !term.own) throw InvalidInput("barrier: smooth term without a function");

  BarrierResult out;
  if (!strictly_feasible(program, x)) {
    out.status = BarrierStatus::NotStrictlyFeasible;
    out.x = std::move(x);
    return out;
  }

  const auto nn = static_cast<Eigen::Index>(n);
  const double m = static_cast<double>(program.rows.size() + program.smooth.size());
  Eigen::VectorXd c(nn);
  for (std::size_t j = 0; j < n; ++j) c(static_cast<Eigen::Index>(j)) = program.cost[j];

  auto objective = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += program.cost[j] * v[j];
    return s;
  };

  double t = 1.0 / (1.0 + std::abs(objective(x)));
  if (m == 0.0) t = 1.0;
  bool stalled = false;
  for (int outer = 0; outer < 200; ++outer) {
    for (int it = 0; it < options.max_newton; ++it) {
      Eigen::VectorXd grad = t * c;
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(nn, nn);
      for (const auto& r : program.rows) {
        const double s = -row_value(r, x);
        for (const auto& a : r.terms) {
          grad(static_cast<Eigen::Index>(a.var)) += a.coef / s;
          for (const auto& b : r.terms)
            H(static_cast<Eigen::Index>(a.var), static_cast<Eigen::Index>(b.var)) +=
                a.coef * b.coef / (s * s);
        }
      }
      for (const auto& g : program.smooth) {
        const double s = -smooth_value(g, x);
        std::vector<std::pair<std::size_t, double>> dg;
        for (const auto& term : g.terms) {
          const Scalar* fn = term.own ? term.own : g.phi;
          const double u = x[term.var] - term.shift;
          dg.emplace_back(term.var, term.weight * fn->d1(u));
          H(static_cast<Eigen::Index>(term.var), static_cast<Eigen::Index>(term.var)) +=
              term.weight * fn->d2(u) / s;
        }
        for (const auto& a : g.linear) dg.emplace_back(a.var, a.coef);
        for (const auto& [i, gi] : dg) {
          grad(static_cast<Eigen::Index>(i)) += gi / s;
          for (const auto& [j, gj] : dg)
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += gi * gj / (s * s);
        }
      }
      const double reg = 1e-13 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
      H.diagonal().array() += reg;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      Eigen::VectorXd dx = -ldlt.solve(grad);
      if (!dx.allFinite()) {
        stalled = true;
        break;
      }
      const double dec2 = -grad.dot(dx);
      ++out.newton_steps;
      if (dec2 / 2.0 <= 1e-12) break;

      // flat directions of the barrier: follow the ray out past the threshold
      const double slope = c.dot(dx);
      if (slope < 0.0) {
        const double reach = (2.0 * options.unbounded_threshold - objective(x)) / slope;
        std::vector<double> far(n);
        for (std::size_t j = 0; j < n; ++j) far[j] = x[j] + reach * dx(static_cast<Eigen::Index>(j));
        if (strictly_feasible(program, far)) {
          out.status = BarrierStatus::Unbounded;
          out.x = far;
          out.objective = objective(far);
          return out;
        }
      }

      double step = dec2 > 0.25 ? 1.0 / (1.0 + std::sqrt(dec2)) : 1.0;
      const double f0 = barrier_value(program, x, t);
      std::vector<double> trial(n);
      bool moved = false;
      for (int ls = 0; ls < 80; ++ls) {
        for (std::size_t j = 0; j < n; ++j) trial[j] = x[j] + step * dx(static_cast<Eigen::Index>(j));
        if (strictly_feasible(program, trial)) {
          const double f1 = barrier_value(program, trial, t);
          if (f1 <= f0 - 0.01 * step * dec2 || dec2 < 1e-6) {
            moved = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!moved) break;
      x = trial;
      if (objective(x) < options.unbounded_threshold) {
        out.status = BarrierStatus::Unbounded;
        out.x = x;
        out.objective = objective(x);
        return out;
      }
    }
    if (stalled) break;
    if (m / t <= options.gap_tolerance) break;
    t *= options.t_growth;
  }

  out.x = x;
  out.objective = objective(x);
  out.gap_bound = m / t;
  out.status = stalled ? BarrierStatus::Stalled : BarrierStatus::Optimal;
  for (const auto& r : program.rows) out.row_multipliers.push_back(1.0 / (-t * row_value(r, x)));
  for (const auto& g : program.smooth)
    out.smooth_multipliers.push_back(1.0 / (-t * smooth_value(g, x)));
  return out;
}

}  // namespace alm::convex
