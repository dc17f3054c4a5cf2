#include "alm/linear_program.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "alm/errors.hpp"

namespace alm::lp {

std::size_t LinearProgram::add_variable(double c, double lo, double hi) {
  if (std::isnan(c) || std::isnan(lo) || std::isnan(hi) || lo > hi)
    throw InvalidInput("LP: bad variable bounds or cost");
  cost.push_back(c);
  lower.push_back(lo);
  upper.push_back(hi);
  return cost.size() - 1;
}

std::size_t LinearProgram::add_row(std::vector<Term> terms, Sense sense, double rhs) {
  for (const Term& t : terms)
    if (t.var >= cost.size() || !std::isfinite(t.coef)) throw InvalidInput("LP: bad row term");
  if (!std::isfinite(rhs)) throw InvalidInput("LP: row rhs not finite");
  rows.push_back({std::move(terms), sense, rhs});
  return rows.size() - 1;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal: return "optimal";
    case Status::Infeasible: return "infeasible";
    case Status::Unbounded: return "unbounded";
    case Status::IterationLimit: return "iteration limit";
  }
  return "?";
}

namespace {

enum class Map { Shift, Flip, Split };

struct VarMap {
  Map kind;
  std::size_t col;
  std::size_t col2;
  double offset;
};

struct Standard {
  Eigen::MatrixXd A;  // m x cols (no artificials)
  Eigen::VectorXd b;  // >= 0
  Eigen::VectorXd c;
  std::vector<double> row_sign;
  std::vector<long> slack_of_row;  // column with +1 in the row, or -1
  std::vector<VarMap> map;
  double constant = 0.0;
};

Standard standardize(const LinearProgram& lp) {
  Standard s;
  std::vector<double> cost;
  std::vector<std::pair<std::size_t, double>> bound_rows;  // (col, upper)
  for (std::size_t j = 0; j < lp.variables(); ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j], c = lp.cost[j];
    if (std::isfinite(lo)) {
      s.map.push_back({Map::Shift, cost.size(), 0, lo});
      s.constant += c * lo;
      cost.push_back(c);
      if (std::isfinite(hi)) bound_rows.emplace_back(cost.size() - 1, hi - lo);
    } else if (std::isfinite(hi)) {
      s.map.push_back({Map::Flip, cost.size(), 0, hi});
      s.constant += c * hi;
      cost.push_back(-c);
    } else {
      s.map.push_back({Map::Split, cost.size(), cost.size() + 1, 0.0});
      cost.push_back(c);
      cost.push_back(-c);
    }
  }
  const std::size_t structural = cost.size();
  const std::size_t m = lp.rows.size() + bound_rows.size();
  std::size_t slacks = bound_rows.size();
  for (const Row& r : lp.rows)
    if (r.sense != Sense::Equal) ++slacks;
  const std::size_t cols = structural + slacks;

  s.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(cols));
  s.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  s.c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  for (std::size_t j = 0; j < structural; ++j) s.c(static_cast<Eigen::Index>(j)) = cost[j];
  s.row_sign.assign(m, 1.0);
  s.slack_of_row.assign(m, -1);

  std::size_t next_slack = structural;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const Row& r = lp.rows[i];
    const auto ii = static_cast<Eigen::Index>(i);
    double rhs = r.rhs;
    for (const Term& t : r.terms) {
      const VarMap& vm = s.map[t.var];
      switch (vm.kind) {
        case Map::Shift:
          s.A(ii, static_cast<Eigen::Index>(vm.col)) += t.coef;
          rhs -= t.coef * vm.offset;
          break;
        case Map::Flip:
          s.A(ii, static_cast<Eigen::Index>(vm.col)) -= t.coef;
          rhs -= t.coef * vm.offset;
          break;
        case Map::Split:
          s.A(ii, static_cast<Eigen::Index>(vm.col)) += t.coef;
          s.A(ii, static_cast<Eigen::Index>(vm.col2)) -= t.coef;
          break;
      }
    }
    long slack = -1;
    if (r.sense == Sense::LessEqual) {
      slack = static_cast<long>(next_slack);
      s.A(ii, static_cast<Eigen::Index>(next_slack++)) = 1.0;
    } else if (r.sense == Sense::GreaterEqual) {
      slack = static_cast<long>(next_slack);
      s.A(ii, static_cast<Eigen::Index>(next_slack++)) = -1.0;
    }
    s.b(ii) = rhs;
    if (rhs < 0.0) {
      s.A.row(ii) *= -1.0;
      s.b(ii) = -rhs;
      s.row_sign[i] = -1.0;
    }
    if (slack >= 0 && s.A(ii, slack) > 0.0) s.slack_of_row[i] = slack;
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    const auto ii = static_cast<Eigen::Index>(lp.rows.size() + k);
    s.A(ii, static_cast<Eigen::Index>(bound_rows[k].first)) = 1.0;
    s.A(ii, static_cast<Eigen::Index>(next_slack)) = 1.0;
    s.slack_of_row[static_cast<std::size_t>(ii)] = static_cast<long>(next_slack++);
    s.b(ii) = bound_rows[k].second;
  }
  return s;
}

class Tableau {
 public:
  Tableau(const Standard& s, std::vector<std::size_t>& artificial_cols)
      : m_(s.A.rows()), cols_(s.A.cols()) {
    std::vector<Eigen::Index> need;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (s.slack_of_row[static_cast<std::size_t>(i)] < 0) need.push_back(i);
    total_ = cols_ + static_cast<Eigen::Index>(need.size());
    T_ = Eigen::MatrixXd::Zero(m_, total_ + 1);
    T_.leftCols(cols_) = s.A;
    T_.col(total_) = s.b;
    basis_.resize(static_cast<std::size_t>(m_));
    for (Eigen::Index i = 0; i < m_; ++i)
      if (s.slack_of_row[static_cast<std::size_t>(i)] >= 0)
        basis_[static_cast<std::size_t>(i)] = s.slack_of_row[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < need.size(); ++k) {
      const Eigen::Index col = cols_ + static_cast<Eigen::Index>(k);
      T_(need[k], col) = 1.0;
      basis_[static_cast<std::size_t>(need[k])] = col;
      artificial_cols.push_back(static_cast<std::size_t>(col));
    }
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index total() const { return total_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  double rhs(Eigen::Index i) const { return T_(i, total_); }
  double at(Eigen::Index i, Eigen::Index j) const { return T_(i, j); }

  void pivot(Eigen::Index r, Eigen::Index e) {
    T_.row(r) /= T_(r, e);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T_(i, e);
      if (f != 0.0) T_.row(i) -= f * T_.row(r);
    }
    for (Eigen::Index i = 0; i < m_; ++i)
      if (T_(i, total_) < 0.0 && T_(i, total_) > -1e-12) T_(i, total_) = 0.0;
    basis_[static_cast<std::size_t>(r)] = e;
  }

  // Returns Optimal, Unbounded or IterationLimit.
  Status run(const Eigen::VectorXd& cost, const std::vector<bool>& allowed, const Options& o,
             int& iterations, int limit) {
    int degenerate = 0;
    for (;;) {
      Eigen::VectorXd cb(m_);
      for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      Eigen::RowVectorXd d = cost.transpose() - cb.transpose() * T_.leftCols(total_);

      const bool bland = degenerate > 30;
      Eigen::Index enter = -1;
      double best = -o.optimality_tolerance;
      for (Eigen::Index j = 0; j < total_; ++j) {
        if (!allowed[static_cast<std::size_t>(j)]) continue;
        if (d(j) < best) {
          enter = j;
          if (bland) break;
          best = d(j);
        }
      }
      if (enter < 0) return Status::Optimal;
      if (iterations >= limit) return Status::IterationLimit;

      Eigen::Index leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = T_(i, enter);
        if (a <= o.pivot_tolerance) continue;
        const double q = T_(i, total_) / a;
        if (q < ratio - 1e-14 ||
            (q <= ratio + 1e-14 && leave >= 0 &&
             basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)])) {
          if (q < ratio) ratio = q;
          leave = i;
        }
      }
      if (leave < 0) return Status::Unbounded;
      degenerate = ratio <= 1e-12 ? degenerate + 1 : 0;
      pivot(leave, enter);
      ++iterations;
    }
  }

 private:
  Eigen::Index m_;
  Eigen::Index cols_;
  Eigen::Index total_ = 0;
  Eigen::MatrixXd T_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

Solution solve(const LinearProgram& program, const Options& options) {
  Solution out;
  const Standard s = standardize(program);
  std::vector<std::size_t> artificial;
  Tableau tb(s, artificial);
  const Eigen::Index m = tb.rows();
  const Eigen::Index total = tb.total();
  const int limit =
      options.max_iterations > 0 ? options.max_iterations : 50 * static_cast<int>(m + total + 1);

  std::vector<bool> is_art(static_cast<std::size_t>(total), false);
  for (std::size_t a : artificial) is_art[a] = true;

  if (!artificial.empty()) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(total);
    for (std::size_t a : artificial) c1(static_cast<Eigen::Index>(a)) = 1.0;
    std::vector<bool> allowed(static_cast<std::size_t>(total), true);
    Status st = tb.run(c1, allowed, options, out.iterations, limit);
    if (st == Status::IterationLimit) {
      out.status = st;
      return out;
    }
    double infeas = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (is_art[static_cast<std::size_t>(tb.basis()[static_cast<std::size_t>(i)])])
        infeas += tb.rhs(i);
    const double scale = 1.0 + (s.b.size() ? s.b.cwiseAbs().maxCoeff() : 0.0);
    if (infeas > options.feasibility_tolerance * scale) {
      out.status = Status::Infeasible;
      out.primal_infeasibility = infeas;
      return out;
    }
    // Drive remaining artificials out where a structural pivot exists.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!is_art[static_cast<std::size_t>(tb.basis()[static_cast<std::size_t>(i)])]) continue;
      Eigen::Index best = -1;
      double mag = options.pivot_tolerance;
      for (Eigen::Index j = 0; j < total; ++j)
        if (!is_art[static_cast<std::size_t>(j)] && std::abs(tb.at(i, j)) > mag) {
          mag = std::abs(tb.at(i, j));
          best = j;
        }
      if (best >= 0) tb.pivot(i, best);
    }
  }

  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(total);
  c2.head(s.c.size()) = s.c;
  std::vector<bool> allowed(static_cast<std::size_t>(total), true);
  for (std::size_t a : artificial) allowed[a] = false;
  Status st = tb.run(c2, allowed, options, out.iterations, limit);
  out.status = st;
  if (st != Status::Optimal) return out;

  // Refine with the final basis.
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(m, total);
  full.leftCols(s.A.cols()) = s.A;
  {
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < m; ++i)
      if (s.slack_of_row[static_cast<std::size_t>(i)] < 0)
        full(i, static_cast<Eigen::Index>(artificial[k++])) = 1.0;
  }
  Eigen::MatrixXd B(m, m);
  Eigen::VectorXd cB(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    B.col(i) = full.col(tb.basis()[static_cast<std::size_t>(i)]);
    cB(i) = c2(tb.basis()[static_cast<std::size_t>(i)]);
  }
  Eigen::VectorXd xstd = Eigen::VectorXd::Zero(total);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  if (m > 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    Eigen::VectorXd xB = lu.solve(s.b);
    // Fall back to the tableau values if the refinement goes astray.
    for (Eigen::Index i = 0; i < m; ++i) {
      double v = xB(i);
      if (!std::isfinite(v) || std::abs(v - tb.rhs(i)) > 1e-6 * (1.0 + std::abs(tb.rhs(i))))
        v = tb.rhs(i);
      xstd(tb.basis()[static_cast<std::size_t>(i)]) = std::max(v, 0.0);
    }
    y = lu.transpose().solve(cB);
  }

  out.dual_infeasibility = 0.0;
  for (Eigen::Index j = 0; j < total; ++j) {
    if (!allowed[static_cast<std::size_t>(j)]) continue;
    const double dj = c2(j) - full.col(j).dot(y);
    out.dual_infeasibility = std::max(out.dual_infeasibility, -dj);
  }
  out.duality_gap = std::abs(c2.dot(xstd) - s.b.dot(y));

  out.x.resize(program.variables());
  for (std::size_t j = 0; j < program.variables(); ++j) {
    const VarMap& vm = s.map[j];
    const double a = xstd(static_cast<Eigen::Index>(vm.col));
    switch (vm.kind) {
      case Map::Shift: out.x[j] = vm.offset + a; break;
      case Map::Flip: out.x[j] = vm.offset - a; break;
      case Map::Split: out.x[j] = a - xstd(static_cast<Eigen::Index>(vm.col2)); break;
    }
  }
  out.duals.resize(program.rows.size());
  for (std::size_t i = 0; i < program.rows.size(); ++i)
    out.duals[i] = s.row_sign[i] * y(static_cast<Eigen::Index>(i));

  out.objective = 0.0;
  for (std::size_t j = 0; j < program.variables(); ++j) out.objective += program.cost[j] * out.x[j];
  out.primal_infeasibility = 0.0;
  for (const Row& r : program.rows) {
    double lhs = 0.0;
    for (const Term& t : r.terms) lhs += t.coef * out.x[t.var];
    double v = 0.0;
    if (r.sense == Sense::LessEqual) v = lhs - r.rhs;
    if (r.sense == Sense::GreaterEqual) v = r.rhs - lhs;
    if (r.sense == Sense::Equal) v = std::abs(lhs - r.rhs);
    out.primal_infeasibility = std::max(out.primal_infeasibility, v);
  }
  return out;
}

}  // namespace alm::lp
