#pragma once

#include <random>
#include <string>
#include <vector>

#include "alm/alm.hpp"

namespace alm::fx {

// Two dates, binary, P = Q uniform. S1 = (90, 110); S2 = (95, 105) below a
// and (99, 109) below b.
inline HedgeProblem t1_problem(std::vector<double> alphas = {2.0, 1.0}, Style style = Style::EU) {
  TreeSpec s;
  s.dates = 2;
  s.nodes = {{"root", 0, std::nullopt},
             {"a", 1, "root", 0.5, 0.5},
             {"b", 1, "root", 0.5, 0.5},
             {"aa", 2, "a", 0.5, 0.5},
             {"ab", 2, "a", 0.5, 0.5},
             {"ba", 2, "b", 0.5, 0.5},
             {"bb", 2, "b", 0.5, 0.5}};
  ScenarioTree t = ScenarioTree::build(s);
  AdaptedProcess S(t, 1, 2);
  S[t.index_of("a")] = 90;
  S[t.index_of("b")] = 110;
  S[t.index_of("aa")] = 95;
  S[t.index_of("ab")] = 105;
  S[t.index_of("ba")] = 99;
  S[t.index_of("bb")] = 109;
  return HedgeProblem::from_benchmark(std::move(t), S, make_call_loss(), std::move(alphas), style);
}

struct TreeShape {
  int dates = 2;
  int min_branch = 2;
  int max_branch = 3;
  bool risk_neutral = false;
};

inline std::vector<double> random_simplex(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> u(0.15, 1.0);
  std::vector<double> w(static_cast<std::size_t>(k));
  double s = 0.0;
  for (double& x : w) s += (x = u(rng));
  for (double& x : w) x /= s;
  return w;
}

inline ScenarioTree random_tree(std::mt19937_64& rng, const TreeShape& shape) {
  std::uniform_int_distribution<int> branch(shape.min_branch, shape.max_branch);
  TreeSpec s;
  s.dates = shape.dates;
  s.nodes.push_back({"r", 0, std::nullopt});
  std::vector<std::string> frontier{"r"};
  for (int d = 1; d <= shape.dates; ++d) {
    std::vector<std::string> next;
    for (const std::string& parent : frontier) {
      const int k = branch(rng);
      auto p = random_simplex(rng, k);
      auto q = shape.risk_neutral ? p : random_simplex(rng, k);
      for (int c = 0; c < k; ++c) {
        std::string id = parent + std::to_string(c);
        s.nodes.push_back({id, d, parent, p[static_cast<std::size_t>(c)], q[static_cast<std::size_t>(c)]});
        next.push_back(id);
      }
    }
    frontier = std::move(next);
  }
  return ScenarioTree::build(s);
}

// Cumulative benchmark from random payments of size `scale`.
inline AdaptedProcess random_benchmark(std::mt19937_64& rng, const ScenarioTree& t, double scale) {
  std::uniform_real_distribution<double> pay(-0.5 * scale, scale);
  AdaptedProcess S(t, 1, t.dates());
  for (NodeIndex i : t.nodes_at(1)) S[i] = pay(rng);
  for (int d = 2; d <= t.dates(); ++d)
    for (NodeIndex i : t.nodes_at(d)) S[i] = S[*t.parent(i)] + pay(rng);
  return S;
}

inline HedgeProblem random_call_problem(std::mt19937_64& rng, const TreeShape& shape,
                                        Style style = Style::EU) {
  ScenarioTree t = random_tree(rng, shape);
  AdaptedProcess S = random_benchmark(rng, t, 10.0);
  std::uniform_real_distribution<double> a(0.2, 3.0);
  std::vector<double> alphas;
  for (int k = 0; k < shape.dates; ++k) alphas.push_back(a(rng));
  return HedgeProblem::from_benchmark(std::move(t), S, make_call_loss(), alphas, style);
}

inline HedgeProblem random_exponential_problem(std::mt19937_64& rng, const TreeShape& shape,
                                               Style style = Style::EU) {
  ScenarioTree t = random_tree(rng, shape);
  AdaptedProcess S = random_benchmark(rng, t, 4.0);
  std::uniform_real_distribution<double> p(0.2, 1.0), a(-0.5, 1.0);
  std::vector<double> alphas;
  for (int k = 0; k < shape.dates; ++k) alphas.push_back(a(rng));
  return HedgeProblem::from_benchmark(std::move(t), S, make_exponential_loss(p(rng)), alphas, style);
}

}  // namespace alm::fx
