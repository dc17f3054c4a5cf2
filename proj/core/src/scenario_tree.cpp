#include "alm/scenario_tree.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "alm/errors.hpp"

namespace alm {

namespace {

constexpr double kSumTolerance = 1e-9;

void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace

ScenarioTree ScenarioTree::build(const TreeSpec& spec) {
  require(spec.dates >= 1, "tree must have at least one payment date");
  require(!spec.nodes.empty(), "tree has no nodes");

  std::unordered_map<std::string, std::size_t> position;
  std::optional<std::size_t> root_pos;
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const NodeSpec& n = spec.nodes[i];
    require(!n.id.empty(), "node with empty id");
    require(position.emplace(n.id, i).second, "duplicate node id '" + n.id + "'");
    if (!n.parent) {
      require(!root_pos, "more than one root node ('" + n.id + "')");
      require(n.date == 0, "root node '" + n.id + "' must be at date 0");
      root_pos = i;
    }
  }
  require(root_pos.has_value(), "tree has no root node");

  std::vector<std::vector<std::size_t>> kids(spec.nodes.size());
  for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
    const NodeSpec& n = spec.nodes[i];
    require(n.date >= 0 && n.date <= spec.dates,
            "node '" + n.id + "' has date outside 0.." + std::to_string(spec.dates));
    if (!n.parent) continue;
    auto it = position.find(*n.parent);
    require(it != position.end(),
            "orphan node '" + n.id + "': parent '" + *n.parent + "' not found");
    require(spec.nodes[it->second].date == n.date - 1,
            "node '" + n.id + "' is not one date after its parent");
    require(std::isfinite(n.p) && n.p > 0.0,
            "P-transition probability of node '" + n.id + "' must be strictly positive");
    require(std::isfinite(n.q) && n.q > 0.0,
            "Q-transition probability of node '" + n.id + "' must be strictly positive");
    kids[it->second].push_back(i);
  }

  ScenarioTree tree;
  tree.dates_ = spec.dates;

  // Breadth-first relabelling; dates strictly increase along edges so every
  // node reachable from the root is visited exactly once.
  std::vector<std::size_t> bfs;
  bfs.reserve(spec.nodes.size());
  std::deque<std::size_t> queue{*root_pos};
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    bfs.push_back(cur);
    for (std::size_t c : kids[cur]) queue.push_back(c);
  }
  require(bfs.size() == spec.nodes.size(), "tree contains unreachable nodes");

  std::vector<NodeIndex> new_index(spec.nodes.size());
  for (std::size_t k = 0; k < bfs.size(); ++k) new_index[bfs[k]] = k;

  tree.nodes_.resize(bfs.size());
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    const NodeSpec& src = spec.nodes[bfs[k]];
    Node& dst = tree.nodes_[k];
    dst.id = src.id;
    dst.date = src.date;
    if (src.parent) {
      dst.parent = new_index[position.at(*src.parent)];
      dst.transition_p = src.p;
      dst.transition_q = src.q;
    }
    for (std::size_t c : kids[bfs[k]]) dst.children.push_back(new_index[c]);
    tree.by_id_.emplace(dst.id, k);
  }

  for (std::size_t k = 1; k < tree.nodes_.size(); ++k)
    require(tree.nodes_[k].date >= tree.nodes_[k - 1].date, "internal: BFS order broken");

  for (NodeIndex i = 0; i < tree.nodes_.size(); ++i) {
    Node& n = tree.nodes_[i];
    if (n.children.empty()) {
      require(n.date == spec.dates, "leaf '" + n.id + "' at date " + std::to_string(n.date) +
                                        " but leaves must be at date " +
                                        std::to_string(spec.dates));
      continue;
    }
    double sp = 0.0;
    double sq = 0.0;
    for (NodeIndex c : n.children) {
      sp += tree.nodes_[c].transition_p;
      sq += tree.nodes_[c].transition_q;
    }
    require(std::abs(sp - 1.0) <= kSumTolerance,
            "P-transition does not sum to 1 at node '" + n.id + "'");
    require(std::abs(sq - 1.0) <= kSumTolerance,
            "Q-transition does not sum to 1 at node '" + n.id + "'");
  }

  tree.order_.resize(tree.nodes_.size());
  tree.date_offsets_.assign(static_cast<std::size_t>(spec.dates) + 2, 0);
  for (NodeIndex i = 0; i < tree.nodes_.size(); ++i) {
    tree.order_[i] = i;
    ++tree.date_offsets_[static_cast<std::size_t>(tree.nodes_[i].date) + 1];
  }
  for (std::size_t d = 1; d < tree.date_offsets_.size(); ++d)
    tree.date_offsets_[d] += tree.date_offsets_[d - 1];

  for (NodeIndex i = 1; i < tree.nodes_.size(); ++i) {
    Node& n = tree.nodes_[i];
    const Node& par = tree.nodes_[*n.parent];
    n.probability_p = par.probability_p * n.transition_p;
    n.probability_q = par.probability_q * n.transition_q;
    require(n.probability_p > 0.0, "unconditional P-probability of '" + n.id + "' underflows");
  }

  // Leaf ranges, children before parents.
  const std::size_t first_leaf = tree.date_offsets_[static_cast<std::size_t>(spec.dates)];
  for (NodeIndex i = tree.nodes_.size(); i-- > 0;) {
    Node& n = tree.nodes_[i];
    if (n.children.empty()) {
      n.leaf_begin = i - first_leaf;
      n.leaf_end = n.leaf_begin + 1;
    } else {
      n.leaf_begin = tree.nodes_[n.children.front()].leaf_begin;
      n.leaf_end = tree.nodes_[n.children.back()].leaf_end;
    }
  }
  return tree;
}

std::span<const NodeIndex> ScenarioTree::nodes_at(int date) const {
  if (date < 0 || date > dates_) throw InvalidInput("date " + std::to_string(date) + " out of range");
  const auto d = static_cast<std::size_t>(date);
  return std::span<const NodeIndex>(order_).subspan(date_offsets_[d],
                                                    date_offsets_[d + 1] - date_offsets_[d]);
}

NodeIndex ScenarioTree::ancestor(NodeIndex i, int date) const {
  if (date > nodes_[i].date || date < 0)
    throw InvalidInput("ancestor date " + std::to_string(date) + " after node date");
  while (nodes_[i].date > date) i = *nodes_[i].parent;
  return i;
}

std::optional<NodeIndex> ScenarioTree::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

NodeIndex ScenarioTree::index_of(const std::string& id) const {
  auto found = find(id);
  if (!found) throw InvalidInput("unknown node id '" + id + "'");
  return *found;
}

bool ScenarioTree::risk_neutral(double tol) const {
  for (const Node& n : nodes_)
    if (std::abs(n.transition_p - n.transition_q) > tol) return false;
  return true;
}

TreeSpec ScenarioTree::spec() const {
  TreeSpec s;
  s.dates = dates_;
  for (const Node& n : nodes_) {
    NodeSpec ns;
    ns.id = n.id;
    ns.date = n.date;
    if (n.parent) ns.parent = nodes_[*n.parent].id;
    ns.p = n.transition_p;
    ns.q = n.transition_q;
    s.nodes.push_back(std::move(ns));
  }
  return s;
}

AdaptedProcess::AdaptedProcess(const ScenarioTree& tree, int first_date, int last_date,
                               double fill)
    : first_(first_date), last_(last_date),
      values_(tree.size(), std::numeric_limits<double>::quiet_NaN()) {
  if (first_date < 0 || last_date > tree.dates() || first_date > last_date)
    throw InvalidInput("invalid process date range");
  for (int d = first_; d <= last_; ++d)
    for (NodeIndex i : tree.nodes_at(d)) values_[i] = fill;
}

AdaptedProcess AdaptedProcess::constant(const ScenarioTree& tree, double c) {
  return AdaptedProcess(tree, 0, tree.dates(), c);
}

AdaptedProcess AdaptedProcess::from_function(const ScenarioTree& tree, int first_date,
                                             int last_date,
                                             const std::function<double(NodeIndex)>& f) {
  AdaptedProcess out(tree, first_date, last_date);
  for (int d = first_date; d <= last_date; ++d)
    for (NodeIndex i : tree.nodes_at(d)) out.values_[i] = f(i);
  return out;
}

double AdaptedProcess::at(const ScenarioTree& tree, NodeIndex i) const {
  if (i >= values_.size() || !defined_at(tree.date(i)))
    throw InvalidInput("process not defined at node '" + tree.id(i) + "'");
  return values_[i];
}

AdaptedProcess conditional_expectation(const ScenarioTree& tree, const AdaptedProcess& process,
                                       Measure measure, int k) {
  return conditional_expectation(tree, process, measure, process.last_date(), k);
}

AdaptedProcess conditional_expectation(const ScenarioTree& tree, const AdaptedProcess& process,
                                       Measure measure, int from_date, int k) {
  if (!process.defined_at(from_date))
    throw InvalidInput("process not defined at date " + std::to_string(from_date));
  if (k < 0 || k > from_date)
    throw InvalidInput("conditioning date " + std::to_string(k) + " out of range");

  std::vector<double> work(process.values().begin(), process.values().end());
  for (int d = from_date - 1; d >= k; --d) {
    for (NodeIndex i : tree.nodes_at(d)) {
      double acc = 0.0;
      for (NodeIndex c : tree.children(i)) acc += tree.transition(c, measure) * work[c];
      work[i] = acc;
    }
  }
  AdaptedProcess out(tree, k, k);
  for (NodeIndex i : tree.nodes_at(k)) out[i] = work[i];
  return out;
}

double expectation(const ScenarioTree& tree, const AdaptedProcess& process, Measure measure,
                   int date) {
  if (!process.defined_at(date))
    throw InvalidInput("process not defined at date " + std::to_string(date));
  double acc = 0.0;
  for (NodeIndex i : tree.nodes_at(date)) acc += tree.probability(i, measure) * process[i];
  return acc;
}

double conditional_mean(const ScenarioTree& tree, NodeIndex i, Measure measure,
                        const std::function<double(NodeIndex)>& f) {
  double acc = 0.0;
  for (NodeIndex c : tree.children(i)) acc += tree.transition(c, measure) * f(c);
  return acc;
}

AdaptedProcess density_process(const ScenarioTree& tree) {
  AdaptedProcess z(tree, 0, tree.dates());
  z[tree.root()] = 1.0;
  for (NodeIndex i = 1; i < tree.size(); ++i)
    z[i] = z[*tree.parent(i)] * tree.transition(i, Measure::Q) / tree.transition(i, Measure::P);
  return z;
}

SupermartingaleReport is_Q_supermartingale(const ScenarioTree& tree, const AdaptedProcess& M,
                                           double tol) {
  if (!M.defined_at(0) || !M.defined_at(tree.dates()))
    throw InvalidInput("supermartingale check needs a process on dates 0..n");
  SupermartingaleReport report;
  for (NodeIndex i = 0; i < tree.size(); ++i) {
    if (tree.is_leaf(i)) continue;
    double mean = conditional_mean(tree, i, Measure::Q, [&](NodeIndex c) { return M[c]; });
    double excess = mean - M[i];
    report.max_excess = std::max(report.max_excess, excess);
    if (!(excess <= tol)) {
      report.holds = false;
      report.violations.push_back({i, mean, M[i]});
    }
  }
  return report;
}

}  // namespace alm
