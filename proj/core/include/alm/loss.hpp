#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "alm/scenario_tree.hpp"

namespace alm {

enum class LossKind { Call, Exponential, Custom };

/// Analytic pieces of a user-supplied loss. Only `eval` and `inf_limit` are
/// mandatory; operations that need a missing piece throw PreconditionError.
struct CustomLossPieces {
  std::string name = "custom";
  std::function<double(double)> eval;
  std::function<double(double)> derivative;
  std::function<double(double)> second_derivative;
  std::function<double(double)> inverse_derivative;
  std::function<double(double)> legendre;
  std::function<double(double)> generalized_inverse;
  double inf_limit = 0.0;
  /// Strictly convex, strictly decreasing, C^1 and Inada at both ends.
  bool inada = false;
};

/// Convex, decreasing, bounded-below loss l applied to the surplus M - S.
///
/// Beyond evaluation it exposes the pieces the recursions need: l', the
/// inverse marginal I = (l')^{-1} on (-inf, 0), the Legendre transform
/// l*(u) = inf_v { l(v) - u v } and the generalized inverse
/// l^{-1}(a) = inf { x : l(x) <= a }. Values are immutable and cheap to copy.
class LossFunction {
 public:
  LossKind kind() const { return kind_; }
  const std::string& name() const { return pieces_->name; }
  /// Exponent p of the exponential loss; 0 otherwise.
  double exponent() const { return exponent_; }

  double operator()(double x) const { return pieces_->eval(x); }
  double derivative(double x) const;
  double second_derivative(double x) const;
  /// I(y) for y < 0. Throws PreconditionError when the loss is not Inada.
  double inverse_derivative(double y) const;
  /// May return -infinity.
  double legendre(double u) const;
  /// Requires alpha > inf_limit(). Falls back to bisection on `eval` for
  /// custom losses without an analytic inverse.
  double generalized_inverse(double alpha) const;
  /// lim_{x -> +inf} l(x).
  double inf_limit() const { return pieces_->inf_limit; }

  bool satisfies_inada() const { return pieces_->inada; }
  bool has_derivative() const { return static_cast<bool>(pieces_->derivative); }
  bool has_second_derivative() const { return static_cast<bool>(pieces_->second_derivative); }

 private:
  friend LossFunction make_call_loss();
  friend LossFunction make_exponential_loss(double p);
  friend LossFunction make_custom_loss(CustomLossPieces pieces);

  LossKind kind_ = LossKind::Custom;
  double exponent_ = 0.0;
  std::shared_ptr<const CustomLossPieces> pieces_;
};

/// l(x) = (-x)^+. Subgradient selection: l'(x) = -1 for x <= 0, 0 for x > 0.
LossFunction make_call_loss();
/// l(x) = exp(-p x) - 1, p > 0.
LossFunction make_exponential_loss(double p);
LossFunction make_custom_loss(CustomLossPieces pieces);

/// Grid check of convexity, monotonicity and boundedness on [lo, hi].
bool looks_convex_decreasing(const LossFunction& loss, double lo, double hi,
                             std::size_t points = 201, double tol = 1e-9);

struct LambdaOptions {
  double initial_lower = 1e-8;  // bracket on -lambda before expansion
  double initial_upper = 1e8;
  double expansion_limit = 1e300;
  double residual_tolerance = 1e-10;
  int max_iterations = 400;
};

/// Per-node multipliers of the one-step problem at date k - 1.
///
/// `lambda` is defined on date k - 1 and NaN at nodes where the floor alone
/// already satisfies the constraint (the indicator is off there).
struct LambdaSolution {
  AdaptedProcess lambda;
  std::vector<bool> binding;  // indexed by node, meaningful at date k - 1
  double max_residual = 0.0;
};

/// Solves E^P[ l( I(lambda Z_k/Z_{k-1}) v floor_k ) | F_{k-1} ] = alpha_k node by
/// node, by bisection on log(-lambda). Without a floor the maximum is dropped
/// and every node is binding. Throws Infeasible when no root can be bracketed.
LambdaSolution solve_lambda(const ScenarioTree& tree, const LossFunction& loss, int k,
                            const std::optional<AdaptedProcess>& floor, double alpha_k,
                            const LambdaOptions& options = {});

/// Scalar version for one node: children described by P-transition weights,
/// measure-change ratios r = q/p and floors (use -inf for none).
double solve_lambda_at(const LossFunction& loss, const std::vector<double>& weights,
                       const std::vector<double>& ratios, const std::vector<double>& floors,
                       double alpha, const LambdaOptions& options = {});

/// Risk-neutral counterpart: smallest level c with sum_c w_c l(c v floor_c) <= alpha.
/// Needs only convexity and monotonicity of l; no inverse marginal.
double solve_level_at(const LossFunction& loss, const std::vector<double>& weights,
                      const std::vector<double>& floors, double alpha);

}  // namespace alm
