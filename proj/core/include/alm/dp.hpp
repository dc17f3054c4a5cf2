#pragma once

#include <string>

#include "alm/problem.hpp"

namespace alm {

/// Backward recursion for the time-consistent constraint with general P and Q.
/// Needs an Inada loss and alpha_k > inf l. The returned wealth is the
/// recursion's own optimizer; `multipliers` holds lambda_{k-1} at date k-1
/// nodes where the constraint binds (NaN elsewhere).
SolveResult tc_solve_general(const HedgeProblem& problem);

/// Risk-neutral variant (P = Q). Works for any convex decreasing loss; the
/// call loss uses the max form, which also admits zero tolerances.
SolveResult tc_solve_riskneutral(const HedgeProblem& problem);

enum class EuRegime { FirstOnly, SecondOnly, Both };
std::string to_string(EuRegime r);

/// Two-date European constraint. Exponential losses are delegated to
/// eu_exponential_n2; the call loss with P = Q is a small LP over date-1
/// nodes; other Inada losses use the generic route.
SolveResult eu_solve_n2(const HedgeProblem& problem);

/// Generic route: date-1 convex program with the threshold map inverted per
/// node. Needs an Inada loss with a second derivative.
SolveResult eu_solve_n2_generic(const HedgeProblem& problem);

/// Lagrange system of the exponential loss at n = 2. The regime is reported
/// in diagnostics["regime"] (0 first only, 1 second only, 2 both).
SolveResult eu_exponential_n2(const HedgeProblem& problem);

/// Two-date lookback value from the date-1 characterization with a budget
/// variable N. Call loss: LP on a closed-form date-1 value function. Inada
/// losses: nested monotone root finding on the Lagrangian.
SolveResult lb_value_n2(const HedgeProblem& problem);

}  // namespace alm
