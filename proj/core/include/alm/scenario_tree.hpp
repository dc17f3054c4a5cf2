#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace alm {

using NodeIndex = std::size_t;

enum class Measure { P, Q };

/// One node record of a tree description. `p` and `q` are transition
/// (conditional) probabilities from the parent; they are ignored for the root.
struct NodeSpec {
  std::string id;
  int date = 0;
  std::optional<std::string> parent;
  double p = 1.0;
  double q = 1.0;
};

struct TreeSpec {
  int dates = 0;
  std::vector<NodeSpec> nodes;
};

/// Finite filtered probability space carrying two equivalent measures.
///
/// Nodes are stored breadth-first: all date-k nodes are contiguous, and the
/// children of a node are contiguous, so the leaves below any node form a
/// contiguous range of `leaves()`. The filtration is the tree structure
/// itself; F_k-measurable random variables are functions of date-k nodes.
class ScenarioTree {
 public:
  struct Node {
    std::string id;
    int date = 0;
    std::optional<NodeIndex> parent;
    std::vector<NodeIndex> children;
    double transition_p = 1.0;
    double transition_q = 1.0;
    double probability_p = 1.0;
    double probability_q = 1.0;
    std::size_t leaf_begin = 0;
    std::size_t leaf_end = 0;
  };

  /// Validates the description and builds the tree. Throws InvalidInput with
  /// the violated invariant in the message.
  static ScenarioTree build(const TreeSpec& spec);

  int dates() const { return dates_; }
  std::size_t size() const { return nodes_.size(); }
  NodeIndex root() const { return 0; }

  const Node& node(NodeIndex i) const { return nodes_.at(i); }
  int date(NodeIndex i) const { return nodes_[i].date; }
  std::optional<NodeIndex> parent(NodeIndex i) const { return nodes_[i].parent; }
  std::span<const NodeIndex> children(NodeIndex i) const { return nodes_[i].children; }
  bool is_leaf(NodeIndex i) const { return nodes_[i].children.empty(); }
  const std::string& id(NodeIndex i) const { return nodes_[i].id; }

  /// Transition probability of reaching `i` from its parent.
  double transition(NodeIndex i, Measure m) const {
    return m == Measure::P ? nodes_[i].transition_p : nodes_[i].transition_q;
  }
  /// Unconditional probability of the atom `i`.
  double probability(NodeIndex i, Measure m) const {
    return m == Measure::P ? nodes_[i].probability_p : nodes_[i].probability_q;
  }

  std::span<const NodeIndex> nodes_at(int date) const;
  std::span<const NodeIndex> leaves() const { return nodes_at(dates_); }
  /// Position range [begin, end) in `leaves()` of the leaves below `i`.
  std::pair<std::size_t, std::size_t> leaf_range(NodeIndex i) const {
    return {nodes_[i].leaf_begin, nodes_[i].leaf_end};
  }

  /// Ancestor of `i` at an earlier (or equal) date.
  NodeIndex ancestor(NodeIndex i, int date) const;
  std::optional<NodeIndex> find(const std::string& id) const;
  NodeIndex index_of(const std::string& id) const;

  /// True when P and Q agree on every transition (to `tol`).
  bool risk_neutral(double tol = 1e-12) const;

  /// Description equivalent to this tree (ids, parents, transitions).
  TreeSpec spec() const;

 private:
  int dates_ = 0;
  std::vector<Node> nodes_;
  std::vector<NodeIndex> order_;            // 0..size-1, sliced per date
  std::vector<std::size_t> date_offsets_;  // dates_ + 2 entries
  std::unordered_map<std::string, NodeIndex> by_id_;
};

/// One real value per node on the contiguous date range [first, last].
/// Entries outside the range are NaN.
class AdaptedProcess {
 public:
  AdaptedProcess() = default;
  AdaptedProcess(const ScenarioTree& tree, int first_date, int last_date,
                 double fill = std::numeric_limits<double>::quiet_NaN());

  static AdaptedProcess constant(const ScenarioTree& tree, double c);
  static AdaptedProcess from_function(const ScenarioTree& tree, int first_date,
                                      int last_date,
                                      const std::function<double(NodeIndex)>& f);

  int first_date() const { return first_; }
  int last_date() const { return last_; }
  bool defined_at(int date) const { return date >= first_ && date <= last_; }
  std::size_t size() const { return values_.size(); }

  double operator[](NodeIndex i) const { return values_[i]; }
  double& operator[](NodeIndex i) { return values_[i]; }
  double at(const ScenarioTree& tree, NodeIndex i) const;

  std::span<const double> values() const { return values_; }

 private:
  int first_ = 0;
  int last_ = -1;
  std::vector<double> values_;
};

/// E[X_j | F_k] as a date-k process, where j is the last date of `process`.
AdaptedProcess conditional_expectation(const ScenarioTree& tree,
                                       const AdaptedProcess& process,
                                       Measure measure, int k);
/// E[X_j | F_k] for an explicit source date j >= k.
AdaptedProcess conditional_expectation(const ScenarioTree& tree,
                                       const AdaptedProcess& process,
                                       Measure measure, int from_date, int k);

/// Scalar expectation of the date-j slice.
double expectation(const ScenarioTree& tree, const AdaptedProcess& process,
                   Measure measure, int date);

/// One-step conditional expectation at node `i` of f(child).
double conditional_mean(const ScenarioTree& tree, NodeIndex i, Measure measure,
                        const std::function<double(NodeIndex)>& f);

/// Density process Z_k = E^P[dQ/dP | F_k], defined on all dates.
AdaptedProcess density_process(const ScenarioTree& tree);

struct SupermartingaleViolation {
  NodeIndex node = 0;
  double conditional_mean = 0.0;  // E^Q[M_{k+1} | node]
  double value = 0.0;             // M_k at node
};

struct SupermartingaleReport {
  bool holds = true;
  double max_excess = -std::numeric_limits<double>::infinity();
  std::vector<SupermartingaleViolation> violations;
  explicit operator bool() const { return holds; }
};

inline constexpr double kDefaultTolerance = 1e-9;

/// Checks E^Q[M_{k+1} | F_k] <= M_k + tol at every non-leaf node.
SupermartingaleReport is_Q_supermartingale(const ScenarioTree& tree,
                                           const AdaptedProcess& M,
                                           double tol = kDefaultTolerance);

}  // namespace alm
