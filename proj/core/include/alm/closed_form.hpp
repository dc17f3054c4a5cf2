#pragma once

#include <optional>
#include <string>
#include <vector>

#include "alm/problem.hpp"

namespace alm {

struct ClosedFormResult {
  double value = 0.0;
  std::string formula_id;
  /// Terminal witness on the atoms of the input (empty when not applicable).
  std::vector<double> witness;
  /// Wealth process witness on the tree, when the formula lives on one.
  std::optional<AdaptedProcess> process;
  std::string binding_term;
};

/// Single-date closed forms. With P = Q (or `part == 2`) the value is
/// E[S_1] + l^{-1}(alpha); otherwise E^Q[S_1] + E^Q[I(lambda* Z_1)].
ClosedFormResult n1_value(const HedgeProblem& problem, std::optional<int> part = std::nullopt);

struct CoincidingResult {
  bool holds = false;
  std::optional<NodeIndex> failing_node;
  ClosedFormResult result;  // meaningful when `holds`
};

/// Checks E[S_n + l^{-1}(alpha_n) | F_k] >= S_k + l^{-1}(alpha_k) node-wise
/// (P = Q required). When it holds, all three styles share the value
/// E[S_n] + l^{-1}(alpha_n) and the martingale witness.
CoincidingResult coinciding_value(const HedgeProblem& problem, double tol = kDefaultTolerance);

struct RiskNeutralTriple {
  ClosedFormResult eu;
  ClosedFormResult tc;
  ClosedFormResult lb;
};

/// Two dates, P = Q, call loss, alpha >= 0.
RiskNeutralTriple riskneutral_n2(const HedgeProblem& problem);

/// inf E[M] s.t. E[(X-M)^+] <= alpha, E[(Y-M)^+] <= beta, on weighted atoms.
ClosedFormResult two_objective_value(const std::vector<double>& X, const std::vector<double>& Y,
                                     const std::vector<double>& prob, double alpha, double beta);

/// inf E[M] s.t. E[max((X-M)^+ - alpha, (Y-M)^+ - beta)] <= 0.
ClosedFormResult two_objective_lookback(const std::vector<double>& X,
                                        const std::vector<double>& Y,
                                        const std::vector<double>& prob, double alpha,
                                        double beta);

/// inf E[M] s.t. E[(Z_k - M)^+] <= alpha_k for pointwise ordered Z_1 <= ... <= Z_n.
ClosedFormResult ordered_objectives_value(const std::vector<std::vector<double>>& Z,
                                          const std::vector<double>& prob,
                                          const std::vector<double>& alphas);

/// EU value max_k {E[S_k] - alpha_k} for a path-wise non-decreasing benchmark
/// (P = Q, call loss). Throws PreconditionError naming the offending node.
ClosedFormResult monotone_exploss_value(const HedgeProblem& problem);

/// CVaR_level(X) on weighted atoms.
double cvar_of(const std::vector<double>& values, const std::vector<double>& prob, double level);
/// Same quantity from sup { E[D X] : 0 <= D <= 1/(1-level), E[D] = 1 } by simplex.
double cvar_of_dual(const std::vector<double>& values, const std::vector<double>& prob,
                    double level);

/// Expected-loss value with constraints E[(S_k - M_k - z_k)^+]/(1-lambda) + z_k <= alpha_k.
double cvar_reduction_G(const HedgeProblem& problem, const std::vector<double>& z);

struct CvarBoxResult {
  double value = 0.0;
  std::vector<double> z;
  int evaluations = 0;
};

/// inf over the box 0 <= z <= alpha of G. G is convex, so a coarse grid
/// followed by nested golden-section search is exact up to the search
/// tolerance. At most three dates.
CvarBoxResult cvar_minimize_G(const HedgeProblem& problem, int grid = 11, double tol = 1e-9);

/// E[S_n] - alpha_n when (S_k - alpha_k) is path-wise increasing (P = Q).
ClosedFormResult cvar_increasing_value(const HedgeProblem& problem);

}  // namespace alm
