#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "alm/loss.hpp"
#include "alm/scenario_tree.hpp"

namespace alm {

enum class Style { EU, TC, LB, CVAR };

std::string to_string(Style s);
Style style_from_string(const std::string& s);

/// Liability stream on a tree together with the constraint specification.
///
/// `benchmark` is the cumulative payment process, defined on dates 0..n with
/// S_0 = 0. `alphas[k-1]` is the tolerance at date k.
struct HedgeProblem {
  ScenarioTree tree;
  AdaptedProcess payments;   // dates 1..n
  AdaptedProcess benchmark;  // dates 0..n
  LossFunction loss;
  std::vector<double> alphas;
  Style style = Style::EU;
  double cvar_level = 0.0;

  int dates() const { return tree.dates(); }
  double alpha(int k) const { return alphas.at(static_cast<std::size_t>(k - 1)); }

  /// Builds S by cumulative summation of the payments.
  static HedgeProblem from_payments(ScenarioTree tree, const AdaptedProcess& payments,
                                    LossFunction loss, std::vector<double> alphas,
                                    Style style = Style::EU, double cvar_level = 0.0);
  /// Recovers the payments P_k = S_k - S_{k-1}; S must be defined on 1..n
  /// (S_0 is taken as 0).
  static HedgeProblem from_benchmark(ScenarioTree tree, const AdaptedProcess& benchmark,
                                     LossFunction loss, std::vector<double> alphas,
                                     Style style = Style::EU, double cvar_level = 0.0);

  HedgeProblem with_style(Style s) const;
  HedgeProblem with_alphas(std::vector<double> a) const;
};

struct SolveResult {
  double v0 = 0.0;
  AdaptedProcess wealth;       // optimal M on dates 0..n
  AdaptedProcess multipliers;  // lambda or thresholds where the method has them
  std::vector<bool> binding;   // per node, meaningful where the method reports it
  Style style = Style::EU;
  std::string solver;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

struct FeasibilityReport {
  bool feasible = true;
  double max_violation = 0.0;
  std::vector<std::string> failures;
  explicit operator bool() const { return feasible; }
};

/// Re-checks the Q-supermartingale property and the style's loss
/// constraints for a candidate wealth process.
FeasibilityReport check_feasibility(const HedgeProblem& problem, const AdaptedProcess& M,
                                    double tol = 1e-8);

/// E^P[l(M_k - S_k) | node] for every date-(k-1) node.
AdaptedProcess conditional_losses(const HedgeProblem& problem, const AdaptedProcess& M, int k);
/// E^P[l(M_k - S_k)].
double expected_loss(const HedgeProblem& problem, const AdaptedProcess& M, int k);
/// E^P[max_k { l(M_k - S_k) - alpha_k }].
double lookback_excess(const HedgeProblem& problem, const AdaptedProcess& M);
/// CVaR_lambda[(S_k - M_k)^+] by sorting the date-k atoms.
double cvar_shortfall(const HedgeProblem& problem, const AdaptedProcess& M, int k);

}  // namespace alm
