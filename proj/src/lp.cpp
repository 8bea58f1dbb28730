#include "netcomp/lp.hpp"

#include "netcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netcomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTolerance = 1e-11;

// x_j = shift + sign·y_pos − y_neg (y_neg only for free variables).
struct VariableMap {
  Eigen::Index pos = -1;
  Eigen::Index neg = -1;
  double sign = 1.0;
  double shift = 0.0;
};

// Dense tableau over standard-form variables 0 <= y <= u.
class Tableau {
 public:
  Tableau(Matrix a, Vector b, Vector upper, const LpOptions& options)
      : t_(std::move(a)), beta_(std::move(b)), upper_(std::move(upper)), options_(options) {
    const auto m = t_.rows();
    const auto d = t_.cols();
    // Artificial columns form the starting basis.
    t_.conservativeResize(m, d + m);
    t_.rightCols(m).setIdentity();
    upper_.conservativeResize(d + m);
    upper_.tail(m).setConstant(kInf);
    structural_ = d;
    at_upper_.assign(static_cast<std::size_t>(d + m), false);
    allowed_.assign(static_cast<std::size_t>(d + m), true);
    basis_.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) basis_[static_cast<std::size_t>(i)] = d + i;
  }

  // Runs simplex iterations for `cost`; returns kOptimal, kUnbounded or kIterationLimit.
  LpStatus optimize(const Vector& cost, int& iterations) {
    const auto m = t_.rows();
    const auto cols = t_.cols();
    std::vector<bool> basic(static_cast<std::size_t>(cols), false);
    Vector cb(m);
    while (true) {
      if (iterations >= options_.max_iterations) return LpStatus::kIterationLimit;
      std::fill(basic.begin(), basic.end(), false);
      for (Eigen::Index i = 0; i < m; ++i) {
        basic[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = true;
        cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
      }
      // Bland: lowest-index improving column.
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < cols; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (basic[ju] || !allowed_[ju]) continue;
        const double reduced = cost(j) - cb.dot(t_.col(j));
        if ((!at_upper_[ju] && reduced < -options_.tolerance && upper_(j) > 0.0) ||
            (at_upper_[ju] && reduced > options_.tolerance)) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      ++iterations;

      const double dir = at_upper_[static_cast<std::size_t>(enter)] ? -1.0 : 1.0;
      double theta = upper_(enter);  // bound flip
      Eigen::Index leave_row = -1;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < m; ++i) {
        const double delta = -dir * t_(i, enter);
        const Eigen::Index var = basis_[static_cast<std::size_t>(i)];
        double limit = kInf;
        bool to_upper = false;
        if (delta < -kPivotTolerance) {
          limit = std::max(0.0, beta_(i)) / -delta;
        } else if (delta > kPivotTolerance && std::isfinite(upper_(var))) {
          limit = std::max(0.0, upper_(var) - beta_(i)) / delta;
          to_upper = true;
        }
        if (limit < theta ||
            (limit == theta && leave_row >= 0 && var < basis_[static_cast<std::size_t>(leave_row)])) {
          theta = limit;
          leave_row = i;
          leave_to_upper = to_upper;
        }
      }
      if (std::isinf(theta)) return LpStatus::kUnbounded;

      const double enter_value = (dir > 0 ? 0.0 : upper_(enter)) + dir * theta;
      beta_.noalias() -= (dir * theta) * t_.col(enter);
      if (leave_row < 0) {
        at_upper_[static_cast<std::size_t>(enter)] = !at_upper_[static_cast<std::size_t>(enter)];
        continue;
      }
      const Eigen::Index leaving = basis_[static_cast<std::size_t>(leave_row)];
      at_upper_[static_cast<std::size_t>(leaving)] = leave_to_upper;
      pivot(leave_row, enter);
      beta_(leave_row) = enter_value;
    }
  }

  double artificial_sum() const {
    double s = 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] >= structural_) s += std::abs(beta_(static_cast<Eigen::Index>(i)));
    }
    return s;
  }

  // Pivots artificials out of the basis and drops redundant rows, then
  // forbids artificial columns.
  void remove_artificials() {
    for (Eigen::Index i = 0; i < t_.rows();) {
      if (basis_[static_cast<std::size_t>(i)] < structural_) {
        ++i;
        continue;
      }
      Eigen::Index best = -1;
      double best_abs = 1e-9;
      for (Eigen::Index j = 0; j < structural_; ++j) {
        if (is_basic(j)) continue;
        if (std::abs(t_(i, j)) > best_abs) {
          best_abs = std::abs(t_(i, j));
          best = j;
        }
      }
      if (best >= 0) {
        const double value = at_upper_[static_cast<std::size_t>(best)] ? upper_(best) : 0.0;
        pivot(i, best);
        beta_(i) = value;
        ++i;
      } else {
        drop_row(i);
      }
    }
    for (Eigen::Index j = structural_; j < t_.cols(); ++j) allowed_[static_cast<std::size_t>(j)] = false;
  }

  Vector structural_values() const {
    Vector y(structural_);
    for (Eigen::Index j = 0; j < structural_; ++j) y(j) = at_upper_[static_cast<std::size_t>(j)] ? upper_(j) : 0.0;
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (basis_[i] < structural_) y(basis_[i]) = beta_(static_cast<Eigen::Index>(i));
    }
    return y;
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }

 private:
  bool is_basic(Eigen::Index j) const { return std::find(basis_.begin(), basis_.end(), j) != basis_.end(); }

  void pivot(Eigen::Index r, Eigen::Index c) {
    const double p = t_(r, c);
    t_.row(r) /= p;
    for (Eigen::Index i = 0; i < t_.rows(); ++i) {
      if (i == r) continue;
      const double f = t_(i, c);
      if (f != 0.0) t_.row(i) -= f * t_.row(r);
    }
    basis_[static_cast<std::size_t>(r)] = c;
  }

  void drop_row(Eigen::Index r) {
    const auto m = t_.rows();
    if (r < m - 1) {
      t_.middleRows(r, m - 1 - r) = t_.bottomRows(m - 1 - r).eval();
      beta_.segment(r, m - 1 - r) = beta_.tail(m - 1 - r).eval();
    }
    t_.conservativeResize(m - 1, Eigen::NoChange);
    beta_.conservativeResize(m - 1);
    basis_.erase(basis_.begin() + r);
  }

  Matrix t_;
  Vector beta_;
  Vector upper_;
  LpOptions options_;
  Eigen::Index structural_ = 0;
  std::vector<bool> at_upper_;
  std::vector<bool> allowed_;
  std::vector<Eigen::Index> basis_;
};

}  // namespace

void LinearProgram::validate() const {
  const auto n = objective.size();
  if (lower.size() != n || upper.size() != n) throw ValidationError("LP bounds do not match the objective length");
  if (equality_matrix.cols() != n && equality_matrix.rows() > 0) {
    throw ValidationError("LP equality matrix has the wrong number of columns");
  }
  if (equality_matrix.rows() != equality_rhs.size()) throw ValidationError("LP equality rhs has the wrong length");
  if (!objective.allFinite() || !equality_rhs.allFinite() || !equality_matrix.allFinite()) {
    throw ValidationError("LP data must be finite");
  }
}

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
    case LpStatus::kIterationLimit:
      return "iteration-limit";
  }
  return "?";
}

LpSolution lp_solve(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  const auto n = lp.objective.size();
  const auto m = lp.equality_rhs.size();
  LpSolution out;

  // Map every variable onto nonnegative standard-form variables.
  std::vector<VariableMap> maps(static_cast<std::size_t>(n));
  Eigen::Index d = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double l = lp.lower(j);
    const double u = lp.upper(j);
    if (l > u || std::isnan(l) || std::isnan(u) || l == kInf || u == -kInf) return out;
    auto& mp = maps[static_cast<std::size_t>(j)];
    mp.pos = d++;
    if (std::isfinite(l)) {
      mp.shift = l;
    } else if (std::isfinite(u)) {
      mp.shift = u;
      mp.sign = -1.0;
    } else {
      mp.neg = d++;
    }
  }
  Matrix a = Matrix::Zero(m, d);
  Vector c = Vector::Zero(d);
  Vector up = Vector::Constant(d, kInf);
  Vector b = lp.equality_rhs;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& mp = maps[static_cast<std::size_t>(j)];
    if (m > 0) {
      a.col(mp.pos) = mp.sign * lp.equality_matrix.col(j);
      if (mp.neg >= 0) a.col(mp.neg) = -lp.equality_matrix.col(j);
      b -= mp.shift * lp.equality_matrix.col(j);
    }
    c(mp.pos) = mp.sign * lp.objective(j);
    if (mp.neg >= 0) c(mp.neg) = -lp.objective(j);
    if (std::isfinite(lp.lower(j)) && std::isfinite(lp.upper(j))) up(mp.pos) = lp.upper(j) - lp.lower(j);
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (b(i) < 0.0) {
      b(i) = -b(i);
      a.row(i) *= -1.0;
    }
  }

  const double scale = 1.0 + (m > 0 ? b.lpNorm<1>() : 0.0);
  Tableau tab(a, b, up, options);
  Vector phase1 = Vector::Zero(d + m);
  phase1.tail(m).setConstant(1.0);
  int iterations = 0;
  LpStatus st = tab.optimize(phase1, iterations);
  out.iterations = iterations;
  if (st == LpStatus::kIterationLimit) {
    out.status = st;
    return out;
  }
  if (tab.artificial_sum() > 1e-8 * scale) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  tab.remove_artificials();
  Vector phase2 = Vector::Zero(d + m);
  phase2.head(d) = c;
  st = tab.optimize(phase2, iterations);
  out.iterations = iterations;
  out.status = st;
  if (st != LpStatus::kOptimal) return out;

  Vector y = tab.structural_values();
  // Refine basic values against the original system to undo tableau drift.
  const auto& basis = tab.basis();
  const auto rows = static_cast<Eigen::Index>(basis.size());
  if (rows > 0) {
    Matrix bmat(m, rows);
    Vector rhs = b;
    std::vector<bool> is_basic(static_cast<std::size_t>(d), false);
    for (Eigen::Index k = 0; k < rows; ++k) {
      bmat.col(k) = a.col(basis[static_cast<std::size_t>(k)]);
      is_basic[static_cast<std::size_t>(basis[static_cast<std::size_t>(k)])] = true;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (!is_basic[static_cast<std::size_t>(j)]) rhs -= a.col(j) * y(j);
    }
    const Vector refined = bmat.colPivHouseholderQr().solve(rhs);
    if (refined.allFinite() && (bmat * refined - rhs).lpNorm<Eigen::Infinity>() <= 1e-9 * scale) {
      for (Eigen::Index k = 0; k < rows; ++k) y(basis[static_cast<std::size_t>(k)]) = refined(k);
    }
  }
  for (Eigen::Index j = 0; j < d; ++j) y(j) = std::clamp(y(j), 0.0, up(j));

  out.x.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto& mp = maps[static_cast<std::size_t>(j)];
    out.x(j) = mp.shift + mp.sign * y(mp.pos) - (mp.neg >= 0 ? y(mp.neg) : 0.0);
  }
  out.value = lp.objective.dot(out.x);
  return out;
}

}  // namespace netcomp
