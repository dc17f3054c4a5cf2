#include "alm/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alm/errors.hpp"

namespace alm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void missing(const std::string& loss, const char* piece) {
  throw PreconditionError("loss '" + loss + "' has no " + piece +
                          " (Inada condition required)");
}

// Smallest x with l(x) <= alpha for a decreasing l, by bracketing then bisection.
double invert_by_bisection(const std::function<double(double)>& l, double alpha) {
  double hi = 1.0;
  int guard = 0;
  while (!(l(hi) <= alpha)) {
    hi = hi > 0 ? 2.0 * hi : -0.5 * hi + 1.0;
    if (++guard > 2000) throw SolverFailure("generalized inverse: no upper bracket");
  }
  double lo = hi - 1.0;
  guard = 0;
  while (l(lo) <= alpha) {
    lo = hi - 2.0 * (hi - lo);
    if (++guard > 2000 || !std::isfinite(lo)) return -kInf;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (l(mid) <= alpha)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace

double LossFunction::derivative(double x) const {
  if (!pieces_->derivative) missing(name(), "derivative");
  return pieces_->derivative(x);
}

double LossFunction::second_derivative(double x) const {
  if (!pieces_->second_derivative) missing(name(), "second derivative");
  return pieces_->second_derivative(x);
}

double LossFunction::inverse_derivative(double y) const {
  if (!pieces_->inada || !pieces_->inverse_derivative)
    throw PreconditionError("loss '" + name() +
                            "' does not satisfy the Inada condition; no inverse marginal");
  if (!(y < 0.0)) throw PreconditionError("inverse marginal needs a negative argument");
  return pieces_->inverse_derivative(y);
}

double LossFunction::legendre(double u) const {
  if (!pieces_->legendre) missing(name(), "Legendre transform");
  return pieces_->legendre(u);
}

double LossFunction::generalized_inverse(double alpha) const {
  if (std::isnan(alpha)) throw InvalidInput("tolerance is NaN");
  if (pieces_->generalized_inverse) return pieces_->generalized_inverse(alpha);
  if (!(alpha > inf_limit()))
    throw PreconditionError("tolerance must exceed the infimum of the loss");
  return invert_by_bisection(pieces_->eval, alpha);
}

LossFunction make_call_loss() {
  auto pieces = std::make_shared<CustomLossPieces>();
  pieces->name = "call";
  pieces->eval = [](double x) { return x < 0.0 ? -x : 0.0; };
  pieces->derivative = [](double x) { return x <= 0.0 ? -1.0 : 0.0; };
  pieces->second_derivative = [](double) { return 0.0; };
  pieces->legendre = [](double u) { return (u >= -1.0 && u <= 0.0) ? 0.0 : -kInf; };
  pieces->generalized_inverse = [](double a) {
    if (!(a >= 0.0)) throw PreconditionError("call loss: tolerance must be non-negative");
    return -a;
  };
  pieces->inf_limit = 0.0;
  pieces->inada = false;
  LossFunction f;
  f.kind_ = LossKind::Call;
  f.pieces_ = std::move(pieces);
  return f;
}

LossFunction make_exponential_loss(double p) {
  if (!(p > 0.0) || !std::isfinite(p))
    throw InvalidInput("exponential loss needs p > 0");
  auto pieces = std::make_shared<CustomLossPieces>();
  pieces->name = "exponential";
  pieces->eval = [p](double x) { return std::expm1(-p * x); };
  pieces->derivative = [p](double x) { return -p * std::exp(-p * x); };
  pieces->second_derivative = [p](double x) { return p * p * std::exp(-p * x); };
  pieces->inverse_derivative = [p](double y) { return -std::log(-y / p) / p; };
  pieces->legendre = [p](double u) {
    if (u < 0.0) {
      double x = -std::log(-u / p) / p;
      return -u / p - 1.0 - u * x;
    }
    return u == 0.0 ? -1.0 : -kInf;
  };
  pieces->generalized_inverse = [p](double a) {
    if (!(a > -1.0)) throw PreconditionError("exponential loss: tolerance must exceed -1");
    return -std::log1p(a) / p;
  };
  pieces->inf_limit = -1.0;
  pieces->inada = true;
  LossFunction f;
  f.kind_ = LossKind::Exponential;
  f.exponent_ = p;
  f.pieces_ = std::move(pieces);
  return f;
}

LossFunction make_custom_loss(CustomLossPieces pieces) {
  if (!pieces.eval) throw InvalidInput("custom loss needs an evaluation function");
  if (!std::isfinite(pieces.inf_limit)) throw InvalidInput("custom loss must be bounded below");
  if (pieces.inada && !pieces.inverse_derivative)
    throw InvalidInput("custom loss flagged Inada but has no inverse marginal");
  LossFunction f;
  f.kind_ = LossKind::Custom;
  f.pieces_ = std::make_shared<const CustomLossPieces>(std::move(pieces));
  return f;
}

bool looks_convex_decreasing(const LossFunction& loss, double lo, double hi, std::size_t points,
                             double tol) {
  if (points < 3 || !(hi > lo)) return false;
  const double h = (hi - lo) / static_cast<double>(points - 1);
  std::vector<double> v(points);
  for (std::size_t i = 0; i < points; ++i) {
    v[i] = loss(lo + h * static_cast<double>(i));
    if (!std::isfinite(v[i]) || v[i] < loss.inf_limit() - tol) return false;
  }
  for (std::size_t i = 1; i < points; ++i)
    if (v[i] > v[i - 1] + tol * (1.0 + std::abs(v[i - 1]))) return false;
  for (std::size_t i = 1; i + 1 < points; ++i)
    if (v[i - 1] + v[i + 1] - 2.0 * v[i] < -tol * (1.0 + std::abs(v[i]))) return false;
  return true;
}

double solve_lambda_at(const LossFunction& loss, const std::vector<double>& weights,
                       const std::vector<double>& ratios, const std::vector<double>& floors,
                       double alpha, const LambdaOptions& options) {
  if (weights.size() != ratios.size() || weights.size() != floors.size())
    throw InvalidInput("solve_lambda_at: size mismatch");
  if (!(alpha > loss.inf_limit()))
    throw Infeasible("root not bracketed: tolerance " + std::to_string(alpha) +
                     " is not above the loss infimum");

  // h(u) = E^P[ l( I(-e^u r) v floor ) ], increasing in u.
  auto h = [&](double u) {
    const double lambda = -std::exp(u);
    double acc = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c)
      acc += weights[c] * loss(std::max(loss.inverse_derivative(lambda * ratios[c]), floors[c]));
    return acc;
  };

  const double u_limit = std::log(options.expansion_limit);
  double lo = std::log(options.initial_lower);
  double hi = std::log(options.initial_upper);
  while (!(h(lo) <= alpha)) {
    lo -= std::max(1.0, std::abs(lo));
    if (lo < -u_limit) throw Infeasible("root not bracketed (lower end)");
  }
  while (!(h(hi) >= alpha)) {
    hi += std::max(1.0, std::abs(hi));
    if (hi > u_limit)
      throw Infeasible("root not bracketed: tolerance unattainable given the floor");
  }

  for (int it = 0; it < options.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = h(mid);
    if (v == alpha) return -std::exp(mid);
    if (v < alpha)
      lo = mid;
    else
      hi = mid;
  }
  const double rl = std::abs(h(lo) - alpha);
  const double rh = std::abs(h(hi) - alpha);
  return -std::exp(rl <= rh ? lo : hi);
}

double solve_level_at(const LossFunction& loss, const std::vector<double>& weights,
                      const std::vector<double>& floors, double alpha) {
  if (weights.size() != floors.size()) throw InvalidInput("solve_level_at: size mismatch");
  auto h = [&](double c) {
    double acc = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) acc += weights[j] * loss(std::max(c, floors[j]));
    return acc;
  };
  // Start from the unfloored cushion; the floor can only lower the answer.
  double hi = loss.generalized_inverse(alpha);
  if (!std::isfinite(hi)) throw Infeasible("tolerance unattainable");
  double lo = hi - 1.0;
  int guard = 0;
  while (h(lo) <= alpha) {
    lo = hi - 2.0 * (hi - lo);
    if (++guard > 2000) return -kInf;
  }
  for (int it = 0; it < 300; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (h(mid) <= alpha)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

LambdaSolution solve_lambda(const ScenarioTree& tree, const LossFunction& loss, int k,
                            const std::optional<AdaptedProcess>& floor, double alpha_k,
                            const LambdaOptions& options) {
  if (k < 1 || k > tree.dates()) throw InvalidInput("solve_lambda: date out of range");
  if (floor && !floor->defined_at(k)) throw InvalidInput("solve_lambda: floor not defined at k");
  if (!loss.satisfies_inada())
    throw PreconditionError("solve_lambda needs a loss satisfying the Inada condition");

  LambdaSolution out;
  out.lambda = AdaptedProcess(tree, k - 1, k - 1, kNaN);
  out.binding.assign(tree.size(), false);

  for (NodeIndex i : tree.nodes_at(k - 1)) {
    std::vector<double> w, r, f;
    double floor_loss = floor ? 0.0 : kInf;
    for (NodeIndex c : tree.children(i)) {
      w.push_back(tree.transition(c, Measure::P));
      r.push_back(tree.transition(c, Measure::Q) / tree.transition(c, Measure::P));
      f.push_back(floor ? (*floor)[c] : -kInf);
      if (floor) floor_loss += w.back() * loss(f.back());
    }
    if (floor_loss <= alpha_k) continue;
    const double lambda = solve_lambda_at(loss, w, r, f, alpha_k, options);
    out.lambda[i] = lambda;
    out.binding[i] = true;
    double acc = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c)
      acc += w[c] * loss(std::max(loss.inverse_derivative(lambda * r[c]), f[c]));
    out.max_residual = std::max(out.max_residual, std::abs(acc - alpha_k));
  }
  return out;
}

}  // namespace alm
