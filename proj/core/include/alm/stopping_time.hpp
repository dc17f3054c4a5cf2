#pragma once

#include <cstddef>
#include <vector>

#include "alm/problem.hpp"
#include "alm/scenario_tree.hpp"

namespace alm {

/// Stopping date per leaf, indexed by position in `tree.leaves()`.
struct StoppingTime {
  std::vector<int> stop_date;
  bool operator==(const StoppingTime&) const = default;
};

/// True iff every event {tau <= k} is a union of date-k atoms.
bool is_stopping_time(const ScenarioTree& tree, const std::vector<int>& stop_date);

/// Number of stopping times valued in {0..n}, saturating at SIZE_MAX.
std::size_t count_stopping_times(const ScenarioTree& tree);

/// Exhaustive list. Throws InvalidInput when the count exceeds `cap`.
std::vector<StoppingTime> enumerate_stopping_times(const ScenarioTree& tree,
                                                   std::size_t cap = 100000);

struct AmericanCheck {
  bool holds = true;
  double worst = 0.0;  // largest E^P[sum_{i=tau+1}^{sigma} (l(M_i - S_i) - alpha_i)]
  StoppingTime tau;
  StoppingTime sigma;
  std::size_t pairs = 0;
};

/// Evaluates the stopping-time family of inequalities over every pair
/// tau <= sigma. Holds iff the worst pair is <= tol.
AmericanCheck check_american_equivalence(const HedgeProblem& problem, const AdaptedProcess& M,
                                         double tol = kDefaultTolerance,
                                         std::size_t cap = 5000);

struct ConditionalCheck {
  bool holds = true;
  double worst = -std::numeric_limits<double>::infinity();
  std::vector<NodeIndex> violating;  // date-(k-1) nodes whose constraint fails
};

/// Node-wise E^P[l(M_k - S_k) | F_{k-1}] <= alpha_k + tol for all k.
ConditionalCheck check_conditional_constraints(const HedgeProblem& problem,
                                               const AdaptedProcess& M,
                                               double tol = kDefaultTolerance);

}  // namespace alm
