#pragma once

#include "netcomp/network.hpp"

#include <vector>

namespace netcomp {

/// Margin and recovery rates of the collateralized clearing mechanism.
struct ClearingParams {
  double mu = 0.0;       // fraction of obligations covered by collateral
  double alpha_x = 1.0;  // recovery on external endowment
  double alpha_L = 1.0;  // recovery on interbank receivables

  void validate() const;
};

/// z_i = true when bank i defaults.
using DefaultSet = std::vector<bool>;

struct ClearingResult {
  Vector payments;
  Vector wealths;
  DefaultSet defaults;
  int iterations = 0;
};

struct ClearingOptions {
  double tolerance = 1e-10;  // sup-norm change on payments
  int max_iterations = 0;    // 0: 10 * n * ceil(-log10(tolerance))
  // Complete the monotone iteration with a default-set solve so the returned
  // payments are an exact fixed point. Only disabled by tests.
  bool finalize = true;
};

/// One application of the clearing map Ψ(p; x, L).
Vector clearing_map(const Vector& payments, const Vector& endowments, const RelativeLiabilities& rel,
                    const ClearingParams& params);

/// V_i = x_i + Σ_j π_ji p_j − (1−μ) p̄_i.
Vector clearing_wealths(const Vector& payments, const Vector& endowments, const RelativeLiabilities& rel,
                        const ClearingParams& params);

/// Greatest clearing vector by monotone iteration from p̄.
ClearingResult clearing_payments(const Vector& endowments, const LiabilityNetwork& network,
                                 const ClearingParams& params, const ClearingOptions& options = {});

/// Clearing engine bound to one network, reusable across many endowment
/// vectors (Monte Carlo, bisection). Immutable after construction.
class ClearingSolver {
 public:
  ClearingSolver(const LiabilityNetwork& network, const ClearingParams& params, const ClearingOptions& options = {});

  ClearingResult solve(const Vector& endowments) const;
  std::size_t size() const noexcept { return static_cast<std::size_t>(rel_.pbar.size()); }
  const RelativeLiabilities& relative() const noexcept { return rel_; }

 private:
  RelativeLiabilities rel_;
  Matrix pi_t_;
  ClearingParams params_;
  ClearingOptions options_;
  int max_iterations_ = 0;
};

/// Fictitious-default (default-set) algorithm started from the empty default set.
ClearingResult fictitious_default_payments(const Vector& endowments, const LiabilityNetwork& network,
                                           const ClearingParams& params);

Vector wealths(const Vector& endowments, const LiabilityNetwork& network, const ClearingParams& params);

/// V = Δ x − δ on the region where `defaults` is the equilibrium default set.
struct AffineWealth {
  Matrix Delta;
  Vector delta;
};

/// Throws SingularSystemError when I − α_L diag(z) Π^T is numerically singular.
AffineWealth affine_matrices(const DefaultSet& defaults, const LiabilityNetwork& network,
                             const ClearingParams& params);
AffineWealth affine_matrices(const DefaultSet& defaults, const RelativeLiabilities& rel,
                             const ClearingParams& params);

/// Payments implied by a fixed default set: solvent banks pay p̄, defaulting
/// banks pay μ p̄ + α_x x + α_L Π^T p.
Vector default_set_payments(const DefaultSet& defaults, const Vector& endowments,
                            const RelativeLiabilities& rel, const ClearingParams& params);

std::size_t default_count(const DefaultSet& defaults);

}  // namespace netcomp
