#include "netcomp/compression.hpp"

#include "netcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace netcomp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

class ViolationLog {
 public:
  explicit ViolationLog(FeasibilityReport& report, double tolerance) : report_(report), tolerance_(tolerance) {}

  void check(double amount, const std::string& what) {
    if (!(amount <= tolerance_)) {
      report_.feasible = false;
      if (report_.violations.size() < 20) {
        report_.violations.push_back(what + " (off by " + format_double(amount) + ")");
      }
    }
    report_.max_violation = std::max(report_.max_violation, std::isnan(amount) ? kInf : std::max(amount, 0.0));
  }

 private:
  FeasibilityReport& report_;
  double tolerance_;
};

std::string entry(std::size_t i, std::size_t col) {
  return "L[" + std::to_string(i + 1) + "," + std::to_string(col) + "]";
}

Vector matrix_net_positions(const Matrix& l) {
  const auto n = l.rows();
  Vector net = l.col(0);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) net(i) += l(i, j + 1) - l(j, i + 1);
  }
  return net;
}

// Euclidean projection onto {x : 0 <= x <= u, Σx = r} (r >= 0 and Σu >= r).
void project_capped_simplex(Vector& x, const std::vector<Eigen::Index>& idx, const Vector& v, const Vector& u,
                            double r) {
  if (idx.empty()) return;
  if (r <= 0.0) {
    for (auto k : idx) x(k) = 0.0;
    return;
  }
  const auto sum_at = [&](double tau) {
    double s = 0.0;
    for (auto k : idx) s += std::clamp(v(k) - tau, 0.0, u(k));
    return s;
  };
  std::vector<double> bps;
  bps.reserve(2 * idx.size());
  for (auto k : idx) {
    bps.push_back(v(k));
    if (std::isfinite(u(k))) bps.push_back(v(k) - u(k));
  }
  std::sort(bps.begin(), bps.end());
  bps.erase(std::unique(bps.begin(), bps.end()), bps.end());
  // s is nonincreasing in tau; find consecutive breakpoints bracketing r.
  double tau = bps.front();
  double s_lo = sum_at(bps.front());
  if (s_lo < r) {
    // Below every breakpoint capped entries sit at u and uncapped ones at v − τ.
    double capped = 0.0;
    double open_sum = 0.0;
    int open = 0;
    for (auto k : idx) {
      if (std::isfinite(u(k))) {
        capped += u(k);
      } else {
        open_sum += v(k);
        ++open;
      }
    }
    if (open == 0) {
      // Σu < r: the set is empty; the caps are the closest point.
      for (auto k : idx) x(k) = u(k);
      return;
    }
    tau = (open_sum + capped - r) / open;
    for (auto k : idx) x(k) = std::clamp(v(k) - tau, 0.0, u(k));
    return;
  }
  for (std::size_t b = 1; b < bps.size(); ++b) {
    const double s_hi = sum_at(bps[b]);
    if (s_hi < r) {
      tau = bps[b - 1] + (s_lo - r) / (s_lo - s_hi) * (bps[b] - bps[b - 1]);
      break;
    }
    tau = bps[b];
    s_lo = s_hi;
  }
  for (auto k : idx) x(k) = std::clamp(v(k) - tau, 0.0, u(k));
}

}  // namespace

CompressionKind parse_compression_kind(const std::string& name) {
  const std::string s = lower(name);
  if (s == "bilateral" || s == "b") return CompressionKind::kBilateral;
  if (s == "conservative" || s == "c") return CompressionKind::kConservative;
  if (s == "rerouting" || s == "r") return CompressionKind::kRerouting;
  if (s == "nonconservative" || s == "n") return CompressionKind::kNonconservative;
  throw ValidationError("unknown constraint set '" + name +
                        "' (expected bilateral, conservative, rerouting or nonconservative)");
}

std::string to_string(CompressionKind kind) {
  switch (kind) {
    case CompressionKind::kBilateral:
      return "bilateral";
    case CompressionKind::kConservative:
      return "conservative";
    case CompressionKind::kRerouting:
      return "rerouting";
    case CompressionKind::kNonconservative:
      return "nonconservative";
  }
  return "?";
}

FeasibilityReport is_feasible(const LiabilityNetwork& network, const ConstraintSpec& spec, double tolerance) {
  return is_feasible(network.matrix(), spec, tolerance);
}

FeasibilityReport is_feasible(const Matrix& l, const ConstraintSpec& spec, double tolerance) {
  const Matrix& base = spec.base.matrix();
  if (l.rows() != base.rows() || l.cols() != base.cols()) {
    throw ValidationError("network is " + std::to_string(l.rows()) + "x" + std::to_string(l.cols()) +
                          " but the base is " + std::to_string(base.rows()) + "x" + std::to_string(base.cols()));
  }
  FeasibilityReport report;
  ViolationLog log(report, tolerance);
  const auto n = static_cast<std::size_t>(l.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c <= n; ++c) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto cc = static_cast<Eigen::Index>(c);
      log.check(-l(ii, cc), entry(i, c) + " is negative");
      if (c == i + 1) log.check(std::abs(l(ii, cc)), entry(i, c) + " is a self-obligation");
    }
    if (spec.fix_society) {
      const auto ii = static_cast<Eigen::Index>(i);
      log.check(std::abs(l(ii, 0) - base(ii, 0)), entry(i, 0) + " differs from the base societal obligation");
    }
  }

  const auto check_upper = [&](bool include_society) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = include_society ? 0 : 1; c <= n; ++c) {
        const auto ii = static_cast<Eigen::Index>(i);
        const auto cc = static_cast<Eigen::Index>(c);
        log.check(l(ii, cc) - base(ii, cc), entry(i, c) + " exceeds the base obligation");
      }
    }
  };
  const auto check_net = [&] {
    const Vector net = matrix_net_positions(l);
    const Vector target = net_positions(spec.base);
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      log.check(std::abs(net(ii) - target(ii)), "net position of bank " + std::to_string(i + 1) + " changed");
    }
  };
  const Vector rows = l.rowwise().sum();
  const Vector base_rows = base.rowwise().sum();

  switch (spec.kind) {
    case CompressionKind::kBilateral:
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        log.check(std::abs(l(ii, 0) - base(ii, 0)), entry(i, 0) + " differs from the base societal obligation");
        for (std::size_t j = i + 1; j < n; ++j) {
          const auto jj = static_cast<Eigen::Index>(j);
          const double d = l(ii, jj + 1) - l(jj, ii + 1);
          const double dt = base(ii, jj + 1) - base(jj, ii + 1);
          log.check(std::abs(d - dt), "bilateral net between banks " + std::to_string(i + 1) + " and " +
                                          std::to_string(j + 1) + " changed");
        }
      }
      check_upper(false);
      break;
    case CompressionKind::kConservative:
      check_net();
      check_upper(true);
      break;
    case CompressionKind::kRerouting:
      check_net();
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        log.check(std::abs(rows(ii) - base_rows(ii)), "total obligations of bank " + std::to_string(i + 1) + " changed");
      }
      break;
    case CompressionKind::kNonconservative:
      check_net();
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        log.check(rows(ii) - base_rows(ii), "total obligations of bank " + std::to_string(i + 1) + " increased");
      }
      break;
  }
  return report;
}

FeasibleRegion::FeasibleRegion(ConstraintSpec spec) : spec_(std::move(spec)) {
  const Matrix& base = spec_.base.matrix();
  const auto n = static_cast<std::size_t>(base.rows());
  const bool loose = spec_.kind == CompressionKind::kRerouting || spec_.kind == CompressionKind::kNonconservative;
  fixed_ = base;
  std::vector<double> ub;
  Matrix index = Matrix::Constant(base.rows(), base.cols(), -1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c <= n; ++c) {
      if (c == i + 1) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const auto cc = static_cast<Eigen::Index>(c);
      bool free = false;
      if (c == 0) {
        free = !spec_.fix_society && spec_.kind != CompressionKind::kBilateral;
      } else if (spec_.kind == CompressionKind::kBilateral) {
        free = base(ii, cc) > 0.0 && base(static_cast<Eigen::Index>(c - 1), ii + 1) > 0.0;
      } else if (spec_.kind == CompressionKind::kConservative) {
        free = base(ii, cc) > 0.0;
      } else {
        free = true;
      }
      if (!free) continue;
      index(ii, cc) = static_cast<double>(coords_.size());
      coords_.push_back({i, c});
      ub.push_back(loose ? kInf : base(ii, cc));
      fixed_(ii, cc) = 0.0;
    }
  }
  const auto d = static_cast<Eigen::Index>(coords_.size());
  upper_ = Eigen::Map<Vector>(ub.data(), d);

  net_ = Matrix::Zero(static_cast<Eigen::Index>(n), d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const auto& co = coords_[static_cast<std::size_t>(k)];
    net_(static_cast<Eigen::Index>(co.row), k) += 1.0;
    if (co.col > 0) net_(static_cast<Eigen::Index>(co.col - 1), k) -= 1.0;
  }
  net_target_ = net_positions(spec_.base) - matrix_net_positions(fixed_);

  rows_.resize(n);
  for (Eigen::Index k = 0; k < d; ++k) rows_[coords_[static_cast<std::size_t>(k)].row].members.push_back(k);
  const Vector base_rows = base.rowwise().sum();
  const Vector fixed_rows = fixed_.rowwise().sum();
  for (std::size_t i = 0; i < n; ++i) {
    auto& g = rows_[i];
    const auto ii = static_cast<Eigen::Index>(i);
    g.target = std::max(0.0, base_rows(ii) - fixed_rows(ii));
    g.mode = spec_.kind == CompressionKind::kRerouting        ? RowMode::kEqual
             : spec_.kind == CompressionKind::kNonconservative ? RowMode::kAtMost
                                                               : RowMode::kNone;
  }

  if (spec_.kind == CompressionKind::kBilateral) {
    for (Eigen::Index k = 0; k < d; ++k) {
      const auto& co = coords_[static_cast<std::size_t>(k)];
      if (co.col == 0 || co.col - 1 < co.row) continue;
      const auto partner = static_cast<Eigen::Index>(index(static_cast<Eigen::Index>(co.col - 1),
                                                           static_cast<Eigen::Index>(co.row + 1)));
      pairs_.emplace_back(k, partner);
    }
  }
}

Vector FeasibleRegion::gather(const Matrix& l) const {
  Vector y(static_cast<Eigen::Index>(coords_.size()));
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    y(static_cast<Eigen::Index>(k)) =
        l(static_cast<Eigen::Index>(coords_[k].row), static_cast<Eigen::Index>(coords_[k].col));
  }
  return y;
}

Matrix FeasibleRegion::scatter(const Vector& y) const {
  Matrix l = fixed_;
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    l(static_cast<Eigen::Index>(coords_[k].row), static_cast<Eigen::Index>(coords_[k].col)) =
        std::max(0.0, y(static_cast<Eigen::Index>(k)));
  }
  return l;
}

LiabilityNetwork FeasibleRegion::to_network(const Vector& y) const { return LiabilityNetwork(scatter(y)); }

Vector FeasibleRegion::net_residual(const Vector& y) const { return net_ * y - net_target_; }

LinearProgram FeasibleRegion::linear_program(const Vector& cost) const {
  const auto d = static_cast<Eigen::Index>(coords_.size());
  if (cost.size() != d) throw ValidationError("LP cost has the wrong length");
  const auto n = static_cast<Eigen::Index>(rows_.size());
  LinearProgram lp;
  if (spec_.kind == CompressionKind::kBilateral) {
    const auto m = static_cast<Eigen::Index>(pairs_.size());
    lp.objective = cost;
    lp.lower = Vector::Zero(d);
    lp.upper = upper_;
    lp.equality_matrix = Matrix::Zero(m, d);
    lp.equality_rhs = Vector::Zero(m);
    const Matrix& base = spec_.base.matrix();
    for (Eigen::Index p = 0; p < m; ++p) {
      const auto [a, b] = pairs_[static_cast<std::size_t>(p)];
      const auto& ca = coords_[static_cast<std::size_t>(a)];
      const auto& cb = coords_[static_cast<std::size_t>(b)];
      lp.equality_matrix(p, a) = 1.0;
      lp.equality_matrix(p, b) = -1.0;
      lp.equality_rhs(p) = base(static_cast<Eigen::Index>(ca.row), static_cast<Eigen::Index>(ca.col)) -
                           base(static_cast<Eigen::Index>(cb.row), static_cast<Eigen::Index>(cb.col));
    }
    return lp;
  }
  const bool has_rows = spec_.kind == CompressionKind::kRerouting || spec_.kind == CompressionKind::kNonconservative;
  const bool slack = spec_.kind == CompressionKind::kNonconservative;
  const Eigen::Index vars = d + (slack ? n : 0);
  const Eigen::Index m = n + (has_rows ? n : 0);
  lp.objective = Vector::Zero(vars);
  lp.objective.head(d) = cost;
  lp.lower = Vector::Zero(vars);
  lp.upper = Vector::Constant(vars, kInf);
  lp.upper.head(d) = upper_;
  lp.equality_matrix = Matrix::Zero(m, vars);
  lp.equality_rhs = Vector::Zero(m);
  lp.equality_matrix.block(0, 0, n, d) = net_;
  lp.equality_rhs.head(n) = net_target_;
  if (has_rows) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (auto k : rows_[static_cast<std::size_t>(i)].members) lp.equality_matrix(n + i, k) = 1.0;
      if (slack) lp.equality_matrix(n + i, d + i) = 1.0;
      lp.equality_rhs(n + i) = rows_[static_cast<std::size_t>(i)].target;
    }
  }
  return lp;
}

Vector FeasibleRegion::project_rows(const Vector& y) const {
  Vector x(y.size());
  for (Eigen::Index k = 0; k < y.size(); ++k) x(k) = std::clamp(y(k), 0.0, upper_(k));
  for (const auto& g : rows_) {
    if (g.mode == RowMode::kNone || g.members.empty()) continue;
    if (g.mode == RowMode::kAtMost) {
      double s = 0.0;
      for (auto k : g.members) s += x(k);
      if (s <= g.target) continue;
    }
    project_capped_simplex(x, g.members, y, upper_, g.target);
  }
  return x;
}

Vector FeasibleRegion::project_bilateral(const Vector& y) const {
  Vector x = y;
  const Matrix& base = spec_.base.matrix();
  for (const auto& [a, b] : pairs_) {
    const auto& ca = coords_[static_cast<std::size_t>(a)];
    const auto& cb = coords_[static_cast<std::size_t>(b)];
    const double ua = base(static_cast<Eigen::Index>(ca.row), static_cast<Eigen::Index>(ca.col));
    const double ub = base(static_cast<Eigen::Index>(cb.row), static_cast<Eigen::Index>(cb.col));
    const double d = ua - ub;
    const double t = std::clamp(0.5 * (y(a) + y(b) + d), std::max(0.0, d), ua);
    x(a) = t;
    x(b) = std::max(0.0, t - d);
  }
  return x;
}

// Semismooth Newton on the dual of min ½‖x − y‖² over {x ∈ rows : N x = t}.
Vector FeasibleRegion::project_newton(const Vector& y, bool& converged) const {
  const auto n = net_.rows();
  const auto d = net_.cols();
  const double scale = 1.0 + std::max(y.lpNorm<Eigen::Infinity>(), net_target_.lpNorm<Eigen::Infinity>());
  Vector lambda = Vector::Zero(n);
  const auto primal = [&](const Vector& lam) { return project_rows(y + net_.transpose() * lam); };
  const auto dual_value = [&](const Vector& lam, const Vector& x) {
    return 0.5 * (x - y).squaredNorm() - lam.dot(net_ * x - net_target_);
  };
  Vector x = primal(lambda);
  double q = dual_value(lambda, x);
  converged = false;
  for (int it = 0; it < 200; ++it) {
    const Vector g = net_target_ - net_ * x;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-12 * scale) {
      converged = true;
      break;
    }
    // Generalized Jacobian of the row projection at w, pushed through N.
    Matrix h = Matrix::Zero(n, n);
    std::vector<bool> in_group(static_cast<std::size_t>(d), false);
    for (const auto& grp : rows_) {
      bool active = grp.mode == RowMode::kEqual;
      if (grp.mode == RowMode::kAtMost) {
        double s = 0.0;
        for (auto k : grp.members) s += x(k);
        active = s >= grp.target - 1e-12 * scale;
      }
      if (!active) continue;
      Vector sum = Vector::Zero(n);
      int count = 0;
      for (auto k : grp.members) {
        in_group[static_cast<std::size_t>(k)] = true;
        if (x(k) > 0.0 && x(k) < upper_(k)) {
          h.noalias() += net_.col(k) * net_.col(k).transpose();
          sum += net_.col(k);
          ++count;
        }
      }
      if (count > 0) h.noalias() -= (sum * sum.transpose()) / static_cast<double>(count);
    }
    for (Eigen::Index k = 0; k < d; ++k) {
      if (!in_group[static_cast<std::size_t>(k)] && x(k) > 0.0 && x(k) < upper_(k)) {
        h.noalias() += net_.col(k) * net_.col(k).transpose();
      }
    }
    const double reg = 1e-10 * std::max(1.0, h.diagonal().maxCoeff());
    h.diagonal().array() += reg;
    const Vector step = h.ldlt().solve(g);
    if (!step.allFinite()) break;
    const double slope = g.dot(step);
    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, s *= 0.5) {
      const Vector lam = lambda + s * step;
      const Vector xs = primal(lam);
      const double qs = dual_value(lam, xs);
      if (qs >= q + 1e-4 * s * slope - 1e-15 * std::abs(q)) {
        lambda = lam;
        x = xs;
        q = qs;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (!converged) {
    converged = (net_ * x - net_target_).lpNorm<Eigen::Infinity>() <= 1e-9 * scale;
  }
  return x;
}

// Re-solves the equality-constrained least-squares problem on the active face
// of x to remove the residual left by the iterative stage.
Vector FeasibleRegion::polish(const Vector& x, const Vector& y) const {
  const auto n = net_.rows();
  const auto d = net_.cols();
  const double scale = 1.0 + std::max(y.lpNorm<Eigen::Infinity>(), net_target_.lpNorm<Eigen::Infinity>());
  std::vector<Eigen::Index> free;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (x(k) > 0.0 && x(k) < upper_(k)) free.push_back(k);
  }
  if (free.empty()) return x;
  std::vector<Eigen::Index> position(static_cast<std::size_t>(d), -1);
  for (std::size_t f = 0; f < free.size(); ++f) position[static_cast<std::size_t>(free[f])] = static_cast<Eigen::Index>(f);

  std::vector<const RowGroup*> active;
  for (const auto& g : rows_) {
    if (g.mode == RowMode::kNone) continue;
    double s = 0.0;
    for (auto k : g.members) s += x(k);
    if (g.mode == RowMode::kEqual || s >= g.target - 1e-9 * scale) active.push_back(&g);
  }
  const auto nf = static_cast<Eigen::Index>(free.size());
  const auto m = n + static_cast<Eigen::Index>(active.size());
  Matrix a = Matrix::Zero(m, nf);
  Vector rhs(m);
  Vector bound_part = x;
  for (auto k : free) bound_part(k) = 0.0;
  for (std::size_t f = 0; f < free.size(); ++f) a.block(0, static_cast<Eigen::Index>(f), n, 1) = net_.col(free[f]);
  rhs.head(n) = net_target_ - net_ * bound_part;
  for (std::size_t r = 0; r < active.size(); ++r) {
    const auto row = n + static_cast<Eigen::Index>(r);
    double fixed_sum = 0.0;
    for (auto k : active[r]->members) {
      const auto p = position[static_cast<std::size_t>(k)];
      if (p >= 0) {
        a(row, p) = 1.0;
      } else {
        fixed_sum += x(k);
      }
    }
    rhs(row) = active[r]->target - fixed_sum;
  }
  Vector yf(nf);
  for (Eigen::Index f = 0; f < nf; ++f) yf(f) = y(free[static_cast<std::size_t>(f)]);
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a * a.transpose());
  const Vector mu = cod.solve(rhs - a * yf);
  const Vector xf = yf + a.transpose() * mu;
  if (!xf.allFinite() || (a * xf - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) return x;
  Vector out = x;
  for (Eigen::Index f = 0; f < nf; ++f) {
    const auto k = free[static_cast<std::size_t>(f)];
    if (xf(f) < -1e-9 * scale || xf(f) > upper_(k) + 1e-9 * scale) return x;
    out(k) = std::clamp(xf(f), 0.0, upper_(k));
  }
  const double before = net_residual(x).lpNorm<Eigen::Infinity>();
  const double after = net_residual(out).lpNorm<Eigen::Infinity>();
  return after <= before ? out : x;
}

Vector FeasibleRegion::project_dykstra(const Vector& y, int max_iterations, double tolerance) const {
  const auto d = net_.cols();
  // Bilateral sets fix each pair difference; the other kinds fix net positions.
  Matrix eq = net_;
  Vector eq_target = net_target_;
  if (spec_.kind == CompressionKind::kBilateral) {
    const LinearProgram lp = linear_program(Vector::Zero(d));
    eq = lp.equality_matrix;
    eq_target = lp.equality_rhs;
  }
  if (eq.rows() == 0) return project_rows(y);
  const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(eq * eq.transpose());
  const auto to_subspace = [&](const Vector& v) -> Vector {
    return v - eq.transpose() * cod.solve(eq * v - eq_target);
  };
  Vector z = y;
  Vector p = Vector::Zero(d);
  Vector q = Vector::Zero(d);
  Vector x = y;
  for (int it = 0; it < max_iterations; ++it) {
    const Vector x_next = project_rows(z + p);
    p = z + p - x_next;
    const Vector z_next = to_subspace(x_next + q);
    q = x_next + q - z_next;
    const double gap = (x_next - z_next).lpNorm<Eigen::Infinity>();
    const double move = (x_next - x).lpNorm<Eigen::Infinity>();
    x = x_next;
    z = z_next;
    if (gap <= tolerance && move <= tolerance) break;
  }
  return x;
}

Vector FeasibleRegion::project(const Vector& y) const {
  if (y.size() != static_cast<Eigen::Index>(coords_.size())) {
    throw ValidationError("candidate has the wrong number of free coordinates");
  }
  if (coords_.empty()) return y;
  if (spec_.kind == CompressionKind::kBilateral) return project_bilateral(y);
  bool converged = false;
  Vector x = project_newton(y, converged);
  if (converged) x = polish(x, y);
  if (!converged || !is_feasible(scatter(x), spec_).feasible) {
    x = polish(project_dykstra(y), y);
  }
  const FeasibilityReport report = is_feasible(scatter(x), spec_);
  if (!report.feasible) {
    throw ConvergenceError("projection onto the " + to_string(spec_.kind) + " set did not converge",
                           report.max_violation);
  }
  return x;
}

LiabilityNetwork maximal_compression_lp(const ConstraintSpec& spec) {
  const FeasibleRegion region(spec);
  if (region.dimension() == 0) return spec.base;
  const LinearProgram lp = region.linear_program(Vector::Ones(static_cast<Eigen::Index>(region.dimension())));
  const LpSolution sol = lp_solve(lp);
  if (sol.status != LpStatus::kOptimal) {
    throw Error("maximal compression LP finished with status " + to_string(sol.status) +
                " although the base network is feasible");
  }
  return region.to_network(sol.x.head(static_cast<Eigen::Index>(region.dimension())));
}

LiabilityNetwork maximal_compression(const ConstraintSpec& spec) {
  if (spec.kind != CompressionKind::kBilateral) return maximal_compression_lp(spec);
  const Matrix& base = spec.base.matrix();
  Matrix out = base;
  const auto n = base.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) out(i, j + 1) = std::max(0.0, base(i, j + 1) - base(j, i + 1));
    }
  }
  return LiabilityNetwork(out);
}

LiabilityNetwork repair(const Matrix& candidate, const ConstraintSpec& spec) {
  const Matrix& base = spec.base.matrix();
  if (candidate.rows() != base.rows() || candidate.cols() != base.cols()) {
    throw ValidationError("candidate dimensions do not match the base network");
  }
  if (candidate.allFinite() && candidate.minCoeff() >= 0.0 && is_feasible(candidate, spec, 1e-9).feasible) {
    bool zero_diagonal = true;
    for (Eigen::Index i = 0; i < candidate.rows(); ++i) zero_diagonal = zero_diagonal && candidate(i, i + 1) == 0.0;
    if (zero_diagonal) return LiabilityNetwork(candidate);
  }
  const FeasibleRegion region(spec);
  return region.to_network(region.project(region.gather(candidate)));
}

}  // namespace netcomp
