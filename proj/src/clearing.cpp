#include "netcomp/clearing.hpp"

#include "netcomp/errors.hpp"

#include <algorithm>
#include <cmath>

namespace netcomp {

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must lie in [0,1], got " + format_double(v));
  }
}

void check_endowments(const Vector& x, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != n) {
    throw ValidationError("endowment vector has " + std::to_string(x.size()) + " entries, network has " +
                          std::to_string(n) + " banks");
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) >= 0.0) || !std::isfinite(x(i))) {
      throw ValidationError("endowment of bank " + std::to_string(i + 1) + " must be finite and nonnegative");
    }
  }
}

Matrix diag_of(const DefaultSet& z) {
  const auto n = static_cast<Eigen::Index>(z.size());
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) d(i, i) = z[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
  return d;
}

// LU of M = I − α_L diag(z) Π^T.
Eigen::PartialPivLU<Matrix> factor_recovery_system(const DefaultSet& z, const Matrix& pi_t, double alpha_L) {
  const auto n = pi_t.rows();
  Matrix m = Matrix::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z[static_cast<std::size_t>(i)]) m.row(i) -= alpha_L * pi_t.row(i);
  }
  Eigen::PartialPivLU<Matrix> lu(m);
  if (n > 0 && !(lu.rcond() > 1e-12)) {
    throw SingularSystemError("recovery system I - alpha_L diag(z) Pi^T is singular for this default set");
  }
  return lu;
}

DefaultSet negative_entries(const Vector& v) {
  DefaultSet z(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) z[static_cast<std::size_t>(i)] = v(i) < 0.0;
  return z;
}

struct DefaultSetSolve {
  Vector payments;
  Vector wealths;
  DefaultSet defaults;
};

Vector payments_for(const DefaultSet& z, const Vector& x, const Vector& pbar, const Matrix& pi_t,
                    const ClearingParams& params) {
  const auto n = pbar.size();
  Vector rhs(n);
  bool any = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z[static_cast<std::size_t>(i)]) {
      any = true;
      rhs(i) = params.mu * pbar(i) + params.alpha_x * x(i);
    } else {
      rhs(i) = pbar(i);
    }
  }
  if (!any) return pbar;
  return factor_recovery_system(z, pi_t, params.alpha_L).solve(rhs);
}

// Fictitious-default iteration from `z`. The default set only grows, so
// starting from a subset of the equilibrium set lands on the greatest
// clearing vector in at most n solves.
DefaultSetSolve solve_default_sets(DefaultSet z, const Vector& x, const Vector& pbar, const Matrix& pi_t,
                                   const ClearingParams& params) {
  const std::size_t n = z.size();
  DefaultSetSolve out;
  for (std::size_t round = 0; round <= n + 1; ++round) {
    out.payments = payments_for(z, x, pbar, pi_t, params);
    out.wealths = x + pi_t * out.payments - (1.0 - params.mu) * pbar;
    bool grew = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!z[i] && out.wealths(static_cast<Eigen::Index>(i)) < 0.0) {
        z[i] = true;
        grew = true;
      }
    }
    if (!grew) break;
  }
  out.defaults = std::move(z);
  return out;
}

Vector apply_map(const Vector& p, const Vector& x, const Vector& pbar, const Matrix& pi_t,
                 const ClearingParams& params) {
  const Vector inflow = pi_t * p;
  Vector out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double assets = x(i) + inflow(i);
    out(i) = assets >= (1.0 - params.mu) * pbar(i)
                 ? pbar(i)
                 : params.mu * pbar(i) + params.alpha_x * x(i) + params.alpha_L * inflow(i);
  }
  return out;
}

}  // namespace

void ClearingParams::validate() const {
  check_unit_interval(mu, "margin mu");
  check_unit_interval(alpha_x, "recovery alpha_x");
  check_unit_interval(alpha_L, "recovery alpha_L");
}

std::size_t default_count(const DefaultSet& defaults) {
  return static_cast<std::size_t>(std::count(defaults.begin(), defaults.end(), true));
}

Vector clearing_map(const Vector& payments, const Vector& endowments, const RelativeLiabilities& rel,
                    const ClearingParams& params) {
  return apply_map(payments, endowments, rel.pbar, rel.interbank().transpose(), params);
}

Vector clearing_wealths(const Vector& payments, const Vector& endowments, const RelativeLiabilities& rel,
                        const ClearingParams& params) {
  return endowments + rel.interbank().transpose() * payments - (1.0 - params.mu) * rel.pbar;
}

Vector default_set_payments(const DefaultSet& defaults, const Vector& endowments, const RelativeLiabilities& rel,
                            const ClearingParams& params) {
  return payments_for(defaults, endowments, rel.pbar, rel.interbank().transpose(), params);
}

ClearingSolver::ClearingSolver(const LiabilityNetwork& network, const ClearingParams& params,
                               const ClearingOptions& options)
    : rel_(relative_liabilities(network)), params_(params), options_(options) {
  params_.validate();
  if (!(options_.tolerance > 0.0)) throw ValidationError("clearing tolerance must be positive");
  pi_t_ = rel_.interbank().transpose();
  const std::size_t n = size();
  max_iterations_ =
      options_.max_iterations > 0
          ? options_.max_iterations
          : static_cast<int>(std::max<std::size_t>(1, 10 * n *
                                                           static_cast<std::size_t>(std::max(
                                                               1.0, std::ceil(-std::log10(options_.tolerance))))));
}

ClearingResult ClearingSolver::solve(const Vector& endowments) const {
  const std::size_t n = size();
  check_endowments(endowments, n);
  const Vector& pbar = rel_.pbar;
  const double unsecured_share = 1.0 - params_.mu;

  ClearingResult result;
  Vector p = pbar;
  Vector inflow(p.size());
  double change = 0.0;
  bool converged = false;
  int it = 0;
  for (; it < max_iterations_; ++it) {
    inflow.noalias() = pi_t_ * p;
    change = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const double assets = endowments(i) + inflow(i);
      const double next = assets >= unsecured_share * pbar(i)
                              ? pbar(i)
                              : params_.mu * pbar(i) + params_.alpha_x * endowments(i) + params_.alpha_L * inflow(i);
      change = std::max(change, std::abs(next - p(i)));
      p(i) = next;
    }
    if (change < options_.tolerance) {
      converged = true;
      ++it;
      break;
    }
  }
  result.iterations = it;

  const Vector v_iter = endowments + pi_t_ * p - unsecured_share * pbar;
  DefaultSet z_iter = negative_entries(v_iter);
  if (options_.finalize && default_count(z_iter) == 0 && p == pbar) {
    result.payments = p;
    result.wealths = v_iter;
    result.defaults = std::move(z_iter);
    return result;
  }
  if (options_.finalize) {
    try {
      DefaultSetSolve exact = solve_default_sets(std::move(z_iter), endowments, pbar, pi_t_, params_);
      const Vector residual = apply_map(exact.payments, endowments, pbar, pi_t_, params_) - exact.payments;
      const double scale = 1.0 + pbar.lpNorm<Eigen::Infinity>();
      const bool fixed_point = residual.lpNorm<Eigen::Infinity>() <= 1e-9 * scale;
      const bool below_iterate = n == 0 || (exact.payments - p).maxCoeff() <= 1e-8 * scale;
      if (fixed_point && below_iterate) {
        result.payments = std::move(exact.payments);
        result.wealths = std::move(exact.wealths);
        result.defaults = negative_entries(result.wealths);
        return result;
      }
    } catch (const SingularSystemError&) {
      // fall through to the iterate
    }
  }
  if (!converged) {
    throw ConvergenceError("clearing iteration did not converge after " + std::to_string(max_iterations_) +
                               " iterations",
                           change);
  }
  result.payments = p;
  result.wealths = endowments + pi_t_ * p - unsecured_share * pbar;
  result.defaults = negative_entries(result.wealths);
  return result;
}

ClearingResult clearing_payments(const Vector& endowments, const LiabilityNetwork& network,
                                 const ClearingParams& params, const ClearingOptions& options) {
  return ClearingSolver(network, params, options).solve(endowments);
}

ClearingResult fictitious_default_payments(const Vector& endowments, const LiabilityNetwork& network,
                                           const ClearingParams& params) {
  params.validate();
  check_endowments(endowments, network.size());
  const RelativeLiabilities rel = relative_liabilities(network);
  DefaultSetSolve solve = solve_default_sets(DefaultSet(network.size(), false), endowments, rel.pbar,
                                             rel.interbank().transpose(), params);
  ClearingResult result;
  result.payments = std::move(solve.payments);
  result.wealths = std::move(solve.wealths);
  result.defaults = negative_entries(result.wealths);
  result.iterations = static_cast<int>(default_count(solve.defaults));
  return result;
}

Vector wealths(const Vector& endowments, const LiabilityNetwork& network, const ClearingParams& params) {
  return clearing_payments(endowments, network, params).wealths;
}

AffineWealth affine_matrices(const DefaultSet& defaults, const LiabilityNetwork& network,
                             const ClearingParams& params) {
  return affine_matrices(defaults, relative_liabilities(network), params);
}

AffineWealth affine_matrices(const DefaultSet& defaults, const RelativeLiabilities& rel,
                             const ClearingParams& params) {
  const auto n = rel.pbar.size();
  if (static_cast<Eigen::Index>(defaults.size()) != n) {
    throw ValidationError("default indicator has the wrong length");
  }
  const Matrix pi_t = rel.interbank().transpose();
  AffineWealth out;
  if (default_count(defaults) == 0) {
    out.Delta = Matrix::Identity(n, n);
    out.delta = (1.0 - params.mu) * rel.pbar - pi_t * rel.pbar;
    return out;
  }
  const Matrix z = diag_of(defaults);
  const auto lu = factor_recovery_system(defaults, pi_t, params.alpha_L);
  const Matrix m_inv_z = lu.solve(z);
  Vector carried = rel.pbar;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (defaults[static_cast<std::size_t>(i)]) carried(i) *= params.mu;  // (I − (1−μ)Z) p̄
  }
  out.Delta = Matrix::Identity(n, n) + params.alpha_x * pi_t * m_inv_z;
  out.delta = (1.0 - params.mu) * rel.pbar - pi_t * lu.solve(carried);
  return out;
}

}  // namespace netcomp
