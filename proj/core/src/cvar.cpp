#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "alm/closed_form.hpp"
#include "alm/errors.hpp"
#include "alm/linear_program.hpp"
#include "alm/oracle.hpp"

namespace alm {

double cvar_of(const std::vector<double>& values, const std::vector<double>& prob, double level) {
  if (values.size() != prob.size()) throw InvalidInput("cvar: size mismatch");
  if (!(level >= 0.0 && level < 1.0)) throw InvalidInput("CVaR level must lie in [0, 1)");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  const double tail = 1.0 - level;
  double mass = 0.0, acc = 0.0;
  for (std::size_t i : order) {
    const double take = std::min(prob[i], tail - mass);
    if (take <= 0.0) break;
    acc += take * values[i];
    mass += take;
  }
  return acc / mass;
}

double cvar_of_dual(const std::vector<double>& values, const std::vector<double>& prob,
                    double level) {
  if (values.size() != prob.size()) throw InvalidInput("cvar: size mismatch");
  if (!(level >= 0.0 && level < 1.0)) throw InvalidInput("CVaR level must lie in [0, 1)");
  lp::LinearProgram prog;
  std::vector<lp::Term> budget;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t d = prog.add_variable(-prob[i] * values[i], 0.0, 1.0 / (1.0 - level));
    budget.push_back({d, prob[i]});
  }
  prog.add_row(std::move(budget), lp::Sense::Equal, 1.0);
  lp::Solution s = lp::solve(prog);
  if (s.status != lp::Status::Optimal) throw SolverFailure("cvar dual: " + lp::to_string(s.status));
  return -s.objective;
}

double cvar_reduction_G(const HedgeProblem& problem, const std::vector<double>& z) {
  const int n = problem.dates();
  if (z.size() != static_cast<std::size_t>(n)) throw InvalidInput("z needs one entry per date");
  for (int k = 1; k <= n; ++k) {
    const double zk = z[static_cast<std::size_t>(k - 1)];
    if (!(zk >= 0.0 && zk <= problem.alpha(k)))
      throw InvalidInput("z out of box at date " + std::to_string(k));
  }
  const ScenarioTree& t = problem.tree;
  AdaptedProcess shifted(t, 1, n);
  for (int k = 1; k <= n; ++k)
    for (NodeIndex i : t.nodes_at(k)) shifted[i] = problem.benchmark[i] - z[static_cast<std::size_t>(k - 1)];
  std::vector<double> tol(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k)
    tol[static_cast<std::size_t>(k - 1)] =
        (1.0 - problem.cvar_level) * (problem.alpha(k) - z[static_cast<std::size_t>(k - 1)]);
  HedgeProblem eu =
      HedgeProblem::from_benchmark(t, shifted, make_call_loss(), std::move(tol), Style::EU);
  return solve_oracle(eu).v0;
}

CvarBoxResult cvar_minimize_G(const HedgeProblem& problem, int grid, double tol) {
  const int n = problem.dates();
  if (n > 3) throw PreconditionError("box search over z is limited to three dates");
  if (grid < 2) throw InvalidInput("grid needs at least two points per axis");
  for (int k = 1; k <= n; ++k)
    if (!(problem.alpha(k) >= 0.0)) throw Infeasible("negative CVaR tolerance");

  CvarBoxResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<double> z(static_cast<std::size_t>(n), 0.0);

  auto eval = [&]() {
    const double g = cvar_reduction_G(problem, z);
    ++best.evaluations;
    if (g < best.value) {
      best.value = g;
      best.z = z;
    }
    return g;
  };

  // min over axes d..n-1 with the earlier coordinates fixed in z.
  std::function<double(std::size_t)> inner = [&](std::size_t d) -> double {
    if (d == z.size()) return eval();
    const double hi = problem.alpha(static_cast<int>(d) + 1);
    if (hi == 0.0) {
      z[d] = 0.0;
      return inner(d + 1);
    }
    const double h = hi / (grid - 1);
    int arg = 0;
    double fbest = std::numeric_limits<double>::infinity();
    for (int g = 0; g < grid; ++g) {
      z[d] = g == grid - 1 ? hi : h * g;
      const double f = inner(d + 1);
      if (f < fbest) {
        fbest = f;
        arg = g;
      }
    }
    double a = std::max(0.0, h * (arg - 1)), b = std::min(hi, h * (arg + 1));
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    z[d] = x1;
    double f1 = inner(d + 1);
    z[d] = x2;
    double f2 = inner(d + 1);
    while (b - a > tol * (1.0 + hi)) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        z[d] = x1;
        f1 = inner(d + 1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        z[d] = x2;
        f2 = inner(d + 1);
      }
    }
    return std::min({fbest, f1, f2});
  };
  inner(0);
  return best;
}

ClosedFormResult cvar_increasing_value(const HedgeProblem& problem) {
  if (!problem.tree.risk_neutral(1e-12))
    throw PreconditionError("explicit CVaR value needs identical P and Q");
  const ScenarioTree& t = problem.tree;
  const int n = t.dates();
  for (int k = 1; k <= n; ++k)
    if (!(problem.alpha(k) >= 0.0)) throw PreconditionError("tolerances must be non-negative");
  for (int k = 2; k <= n; ++k)
    for (NodeIndex i : t.nodes_at(k))
      if (problem.benchmark[i] - problem.alpha(k) <
          problem.benchmark[*t.parent(i)] - problem.alpha(k - 1))
        throw PreconditionError("S_k - alpha_k decreases at node '" + t.id(i) + "'");
  AdaptedProcess M(t, 0, n);
  for (NodeIndex i : t.nodes_at(n)) M[i] = problem.benchmark[i] - problem.alpha(n);
  for (int k = n - 1; k >= 0; --k)
    for (NodeIndex i : t.nodes_at(k))
      M[i] = conditional_mean(t, i, Measure::P, [&](NodeIndex c) { return M[c]; });
  ClosedFormResult r;
  r.value = M[t.root()];
  r.formula_id = "cvar-increasing";
  r.binding_term = "k=" + std::to_string(n);
  r.process = M;
  return r;
}

}  // namespace alm
