#include <algorithm>
#include <cmath>
#include <limits>

#include "alm/dp.hpp"
#include "alm/errors.hpp"
#include "alm/linear_program.hpp"

namespace alm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cell {
  NodeIndex node;
  double P = 0.0, Q = 0.0, S1 = 0.0, A = 0.0;
  std::vector<NodeIndex> kids;
  std::vector<double> p, q, r, S2;
};

std::vector<Cell> cells_of(const HedgeProblem& prob) {
  const ScenarioTree& t = prob.tree;
  std::vector<Cell> out;
  for (NodeIndex j : t.nodes_at(1)) {
    Cell c;
    c.node = j;
    c.P = t.probability(j, Measure::P);
    c.Q = t.probability(j, Measure::Q);
    c.S1 = prob.benchmark[j];
    for (NodeIndex k : t.children(j)) {
      c.kids.push_back(k);
      c.p.push_back(t.transition(k, Measure::P));
      c.q.push_back(t.transition(k, Measure::Q));
      c.r.push_back(c.q.back() / c.p.back());
      c.S2.push_back(prob.benchmark[k]);
      c.A += c.q.back() * c.S2.back();
    }
    out.push_back(std::move(c));
  }
  return out;
}

SolveResult lb_call(const HedgeProblem& prob) {
  const auto cells = cells_of(prob);
  const double a1 = prob.alpha(1), a2 = prob.alpha(2);
  lp::LinearProgram lp;
  std::vector<std::size_t> m, nb, w, s;
  std::vector<lp::Term> budget;
  std::vector<double> rho;
  for (const Cell& c : cells) {
    double rh = kInf;
    for (std::size_t i = 0; i < c.p.size(); ++i) rh = std::min(rh, c.p[i] / c.q[i]);
    rho.push_back(rh);
    m.push_back(lp.add_variable(c.Q));
    nb.push_back(lp.add_variable(0.0));
    w.push_back(lp.add_variable(0.0, 0.0));
    s.push_back(lp.add_variable(0.0, 0.0));
    const std::size_t j = m.size() - 1;
    // M >= A - (N + a2)/rho + (1/rho - 1) w
    lp.add_row({{m[j], 1.0}, {nb[j], 1.0 / rh}, {w[j], 1.0 - 1.0 / rh}}, lp::Sense::GreaterEqual,
               c.A - a2 / rh);
    lp.add_row({{nb[j], 1.0}, {w[j], -1.0}}, lp::Sense::GreaterEqual, -a2);
    lp.add_row({{w[j], 1.0}, {s[j], -1.0}}, lp::Sense::GreaterEqual, a2 - a1);
    lp.add_row({{s[j], 1.0}, {m[j], 1.0}}, lp::Sense::GreaterEqual, c.S1);
    budget.push_back({nb[j], c.P});
  }
  lp.add_row(budget, lp::Sense::LessEqual, 0.0);
  const lp::Solution sol = lp::solve(lp);
  if (sol.status == lp::Status::Infeasible) throw Infeasible("two-date lookback program infeasible");
  if (sol.status == lp::Status::Unbounded) throw Unbounded("two-date lookback program unbounded");
  if (sol.status != lp::Status::Optimal) throw SolverFailure("two-date lookback program: " + lp::to_string(sol.status));

  SolveResult r;
  r.style = Style::LB;
  r.solver = "dp-lb-call-lp";
  r.wealth = AdaptedProcess(prob.tree, 0, 2);
  r.binding.assign(prob.tree.size(), false);
  double v0 = 0.0;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const Cell& c = cells[j];
    const double M1 = sol.x[m[j]];
    const double z = std::max(c.S1 - M1, 0.0) - a1;
    const double wj = std::max(z + a2, 0.0);
    const double base = wj - a2;
    const double N = std::max(sol.x[nb[j]], base);
    std::size_t star = 0;
    for (std::size_t i = 1; i < c.p.size(); ++i)
      if (c.p[i] / c.q[i] < c.p[star] / c.q[star]) star = i;
    r.wealth[c.node] = M1;
    for (std::size_t i = 0; i < c.kids.size(); ++i) {
      double d = wj;
      if (i == star) d += (N - base) / c.p[i];
      r.wealth[c.kids[i]] = c.S2[i] - d;
    }
    v0 += c.Q * M1;
  }
  r.wealth[prob.tree.root()] = v0;
  r.v0 = v0;
  r.diagnostics["duality_gap"] = sol.duality_gap;
  return r;
}

// Date-1 value F(M) = min E^P[max(z, l(x) - a2) | node] over children
// x with E^Q[x] = M - A, and its derivative.
struct NodeState {
  double F = 0.0, dF = 0.0, kappa = 0.0, x0 = kInf;
  std::vector<double> x;
};

class SmoothNode {
 public:
  SmoothNode(const Cell& c, const LossFunction& l, double a1, double a2)
      : c_(c), l_(l), a1_(a1), a2_(a2) {}

  NodeState state(double M) const {
    NodeState st;
    const double z = l_(M - c_.S1) - a1_;
    const double zz = z + a2_;
    st.x0 = zz > l_.inf_limit() ? l_.generalized_inverse(zz) : kInf;
    const double budget = M - c_.A;
    const std::size_t K = c_.p.size();
    st.x.assign(K, st.x0);
    if (std::isfinite(st.x0) && st.x0 <= budget) {
      st.F = z;
      st.dF = l_.derivative(M - c_.S1);
      return st;
    }
    auto h = [&](double u) {
      double s = 0.0;
      for (std::size_t i = 0; i < K; ++i) s += c_.q[i] * std::min(l_.inverse_derivative(-std::exp(u) * c_.r[i]), st.x0);
      return s;  // decreasing in u
    };
    double lo = -1.0, hi = 1.0;
    for (int g = 0; h(lo) < budget; ++g) {
      lo -= 2.0 * (1.0 + std::abs(lo));
      if (g > 200 || lo < -700.0) throw SolverFailure("lookback budget map not bracketed");
    }
    for (int g = 0; h(hi) > budget; ++g) {
      hi += 2.0 * (1.0 + std::abs(hi));
      if (g > 200 || hi > 700.0) throw SolverFailure("lookback budget map not bracketed");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (h(mid) >= budget ? lo : hi) = mid;
    }
    st.kappa = std::exp(0.5 * (lo + hi));
    // Children capped at x0 sit on the kink of max(z, l(x) - a2); the share
    // of z in their subgradient is 1 - kappa r / (-l'(x0)).
    double flat = 0.0, loss = 0.0;
    const double slope0 = std::isfinite(st.x0) ? -l_.derivative(st.x0) : 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      const double xi = l_.inverse_derivative(-st.kappa * c_.r[i]);
      if (xi >= st.x0) flat += c_.p[i] * std::max(0.0, 1.0 - st.kappa * c_.r[i] / slope0);
      st.x[i] = std::min(xi, st.x0);
      loss += c_.p[i] * l_(st.x[i]);
    }
    st.F = loss - a2_;
    st.dF = -st.kappa + flat * l_.derivative(M - c_.S1);
    return st;
  }

  // M with F'(M) = target < 0; F' is increasing.
  double argmin(double target) const {
    double lo = c_.S1 - 1.0, hi = c_.S1 + 1.0;
    double step = 1.0;
    for (int g = 0; state(lo).dF > target; ++g) {
      step *= 2.0;
      lo -= step;
      if (g > 2000) throw SolverFailure("lookback stationarity not bracketed");
    }
    step = 1.0;
    for (int g = 0; state(hi).dF < target; ++g) {
      step *= 2.0;
      hi += step;
      if (g > 2000) throw SolverFailure("lookback stationarity not bracketed");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (state(mid).dF < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  const Cell& c_;
  const LossFunction& l_;
  double a1_, a2_;
};

SolveResult lb_smooth(const HedgeProblem& prob) {
  const LossFunction& l = prob.loss;
  const double a1 = prob.alpha(1), a2 = prob.alpha(2);
  if (!(a1 > l.inf_limit()) || !(a2 > l.inf_limit()))
    throw Infeasible("lookback tolerances must exceed the infimum of the loss");
  const auto cells = cells_of(prob);
  const std::size_t J = cells.size();
  std::vector<SmoothNode> nodes;
  for (const Cell& c : cells) nodes.emplace_back(c, l, a1, a2);

  auto solve_at = [&](double lnu, std::vector<double>& M) {
    const double nu = std::exp(lnu);
    double g = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      M[j] = nodes[j].argmin(-(cells[j].Q / cells[j].P) / nu);
      g += cells[j].P * nodes[j].state(M[j]).F;
    }
    return g;  // decreasing in nu
  };

  std::vector<double> Mlo(J), Mhi(J), Mmid(J);
  double lo = -1.0, hi = 1.0;
  double glo = solve_at(lo, Mlo), ghi = solve_at(hi, Mhi);
  for (int g = 0; glo < 0.0; ++g) {
    lo -= 2.0 * (1.0 + std::abs(lo));
    if (g > 200 || lo < -700.0) throw SolverFailure("lookback multiplier not bracketed");
    glo = solve_at(lo, Mlo);
  }
  for (int g = 0; ghi > 0.0; ++g) {
    hi += 2.0 * (1.0 + std::abs(hi));
    if (g > 200 || hi > 700.0) throw SolverFailure("lookback multiplier not bracketed");
    ghi = solve_at(hi, Mhi);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = solve_at(mid, Mmid);
    if (gm >= 0.0) {
      lo = mid, glo = gm, Mlo = Mmid;
    } else {
      hi = mid, ghi = gm, Mhi = Mmid;
    }
  }
  // A jump in M across the final bracket sits on a linear piece of F;
  // interpolate to hit the budget exactly.
  std::vector<double> M = Mhi;
  if (glo > 0.0 && ghi < 0.0) {
    const double th = glo / (glo - ghi);
    for (std::size_t j = 0; j < J; ++j) M[j] = Mlo[j] + th * (Mhi[j] - Mlo[j]);
  } else if (ghi < 0.0 && glo == 0.0) {
    M = Mlo;
  }

  SolveResult r;
  r.style = Style::LB;
  r.solver = "dp-lb-lagrange";
  r.wealth = AdaptedProcess(prob.tree, 0, 2);
  r.binding.assign(prob.tree.size(), false);
  double v0 = 0.0, excess = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    const Cell& c = cells[j];
    const NodeState st = nodes[j].state(M[j]);
    r.wealth[c.node] = M[j];
    for (std::size_t i = 0; i < c.kids.size(); ++i) r.wealth[c.kids[i]] = c.S2[i] + st.x[i];
    v0 += c.Q * M[j];
    excess += c.P * st.F;
  }
  r.wealth[prob.tree.root()] = v0;
  r.v0 = v0;
  r.diagnostics["multiplier"] = std::exp(0.5 * (lo + hi));
  r.diagnostics["excess"] = excess;
  return r;
}

}  // namespace

SolveResult lb_value_n2(const HedgeProblem& problem) {
  if (problem.dates() != 2)
    throw PreconditionError("two-date lookback solver called with n = " + std::to_string(problem.dates()));
  if (problem.loss.kind() == LossKind::Call) return lb_call(problem);
  if (!problem.loss.satisfies_inada())
    throw PreconditionError("two-date lookback solver needs the call loss or an Inada loss");
  return lb_smooth(problem);
}

}  // namespace alm
