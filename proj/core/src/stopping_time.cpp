#include "alm/stopping_time.hpp"

#include <algorithm>
#include <limits>

#include "alm/errors.hpp"

namespace alm {

namespace {

std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a)
    return std::numeric_limits<std::size_t>::max();
  return a * b;
}

std::size_t sat_add(std::size_t a, std::size_t b) {
  return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max()
                                                         : a + b;
}

std::size_t count_below(const ScenarioTree& t, NodeIndex i) {
  if (t.is_leaf(i)) return 1;
  std::size_t prod = 1;
  for (NodeIndex c : t.children(i)) prod = sat_mul(prod, count_below(t, c));
  return sat_add(prod, 1);
}

// All stopping-date labellings of the leaves below i, restricted to tau >= date(i).
std::vector<std::vector<int>> enumerate_below(const ScenarioTree& t, NodeIndex i) {
  const auto [b, e] = t.leaf_range(i);
  const std::size_t width = e - b;
  std::vector<std::vector<int>> out;
  out.emplace_back(width, t.date(i));  // stop here
  if (t.is_leaf(i)) return out;

  std::vector<std::vector<int>> partial{{}};
  for (NodeIndex c : t.children(i)) {
    auto sub = enumerate_below(t, c);
    std::vector<std::vector<int>> next;
    next.reserve(partial.size() * sub.size());
    for (const auto& p : partial)
      for (const auto& s : sub) {
        auto v = p;
        v.insert(v.end(), s.begin(), s.end());
        next.push_back(std::move(v));
      }
    partial = std::move(next);
  }
  for (auto& p : partial) out.push_back(std::move(p));
  return out;
}

}  // namespace

bool is_stopping_time(const ScenarioTree& tree, const std::vector<int>& stop_date) {
  auto leaves = tree.leaves();
  if (stop_date.size() != leaves.size()) return false;
  for (int v : stop_date)
    if (v < 0 || v > tree.dates()) return false;
  for (int k = 0; k <= tree.dates(); ++k)
    for (NodeIndex i : tree.nodes_at(k)) {
      const auto [b, e] = tree.leaf_range(i);
      const bool first = stop_date[b] <= k;
      for (std::size_t j = b + 1; j < e; ++j)
        if ((stop_date[j] <= k) != first) return false;
    }
  return true;
}

std::size_t count_stopping_times(const ScenarioTree& tree) {
  return count_below(tree, tree.root());
}

std::vector<StoppingTime> enumerate_stopping_times(const ScenarioTree& tree, std::size_t cap) {
  const std::size_t count = count_stopping_times(tree);
  if (count > cap)
    throw InvalidInput("stopping-time enumeration cap exceeded: " + std::to_string(count) +
                       " > " + std::to_string(cap));
  std::vector<StoppingTime> out;
  out.reserve(count);
  for (auto& v : enumerate_below(tree, tree.root())) out.push_back({std::move(v)});
  return out;
}

AmericanCheck check_american_equivalence(const HedgeProblem& problem, const AdaptedProcess& M,
                                         double tol, std::size_t cap) {
  const ScenarioTree& t = problem.tree;
  const int n = t.dates();
  auto taus = enumerate_stopping_times(t, cap);
  auto leaves = t.leaves();

  // Per leaf: prefix sums of the excess loss along the path.
  std::vector<std::vector<double>> prefix(leaves.size(), std::vector<double>(n + 1, 0.0));
  std::vector<double> weight(leaves.size());
  for (std::size_t j = 0; j < leaves.size(); ++j) {
    weight[j] = t.probability(leaves[j], Measure::P);
    std::vector<NodeIndex> path(n + 1);
    for (NodeIndex i = leaves[j];; i = *t.parent(i)) {
      path[t.date(i)] = i;
      if (t.date(i) == 0) break;
    }
    for (int k = 1; k <= n; ++k)
      prefix[j][k] = prefix[j][k - 1] + problem.loss(M[path[k]] - problem.benchmark[path[k]]) -
                     problem.alpha(k);
  }

  AmericanCheck out;
  out.worst = -std::numeric_limits<double>::infinity();
  for (const auto& tau : taus)
    for (const auto& sigma : taus) {
      bool ordered = true;
      for (std::size_t j = 0; j < leaves.size() && ordered; ++j)
        ordered = tau.stop_date[j] <= sigma.stop_date[j];
      if (!ordered) continue;
      ++out.pairs;
      double acc = 0.0;
      for (std::size_t j = 0; j < leaves.size(); ++j)
        acc += weight[j] * (prefix[j][sigma.stop_date[j]] - prefix[j][tau.stop_date[j]]);
      if (acc > out.worst) {
        out.worst = acc;
        out.tau = tau;
        out.sigma = sigma;
      }
    }
  out.holds = out.worst <= tol;
  return out;
}

ConditionalCheck check_conditional_constraints(const HedgeProblem& problem,
                                               const AdaptedProcess& M, double tol) {
  ConditionalCheck out;
  for (int k = 1; k <= problem.dates(); ++k) {
    AdaptedProcess c = conditional_losses(problem, M, k);
    for (NodeIndex i : problem.tree.nodes_at(k - 1)) {
      const double excess = c[i] - problem.alpha(k);
      out.worst = std::max(out.worst, excess);
      if (excess > tol) {
        out.holds = false;
        out.violating.push_back(i);
      }
    }
  }
  return out;
}

}  // namespace alm
