#pragma once

#include "netcomp/clearing.hpp"
#include "netcomp/network.hpp"

#include <limits>
#include <vector>

namespace netcomp {

/// Systematic exposure C(t) = b·e^{rT} + s·t driven by a lognormal factor
/// q ~ LogN((r − σ²/2)T, σ²T).
struct ShockModel {
  Vector riskless;  // b
  Vector risky;     // s
  double rate = 0.0;
  double volatility = 0.2;
  double horizon = 1.0;

  void validate() const;
  Vector exposure(double t) const;
  double growth() const;  // e^{rT}
};

enum class ThresholdMethod {
  kBisection,   // per-bank bisection on the clearing engine
  kRegimeWalk,  // exact walk down the piecewise-affine default regimes
  kAuto,        // regime walk, bisection when a regime system is singular
};

struct ThresholdOptions {
  double relative_tolerance = 1e-9;
  double bracket_cap = 1099511627776.0;  // 2^40
};

/// q*_i = inf{t >= 0 : V_i(C(t), L) >= 0}, +inf for banks insolvent at every level.
Vector solvency_thresholds(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                           const ThresholdOptions& options = {});

/// Same thresholds computed by walking the default regimes from t = +inf downwards.
Vector solvency_thresholds_regime_walk(const LiabilityNetwork& network, const ShockModel& shock,
                                       const ClearingParams& params);

/// Ordered thresholds and the affine wealth map of every regime.
///
/// Regime k (0..n) covers t in [boundary(k+1), boundary(k)) where
/// boundary(0) = +inf, boundary(n+1) = 0 and boundary(k) = q*_[k]. Its default
/// set holds every bank with q*_i >= q*_[k] (empty for k = 0).
///
/// Inside regime k the wealths are affine in the factor level:
/// V(C(t)) = intercepts[k] + slopes[k]·t with intercept Δ_k b e^{rT} − δ_k and
/// slope Δ_k s. `regimes[k]` holds (Δ_k, δ_k); it is left empty (0x0) when the
/// recovery system of that regime is singular, in which case the affine
/// coefficients are fitted from the clearing engine.
struct ThresholdProfile {
  Vector qstar;
  std::vector<std::size_t> order;  // order[k-1] = [k], 0-based bank index
  std::vector<DefaultSet> default_sets;
  std::vector<AffineWealth> regimes;
  std::vector<Vector> intercepts;
  std::vector<Vector> slopes;

  std::size_t size() const noexcept { return static_cast<std::size_t>(qstar.size()); }
  double boundary(std::size_t k) const;
  /// Regime whose interval contains t.
  std::size_t regime_of(double t) const;
  Vector regime_wealths(std::size_t k, double t) const { return intercepts[k] + slopes[k] * t; }
};

ThresholdProfile threshold_profile(const LiabilityNetwork& network, const ShockModel& shock,
                                   const ClearingParams& params, ThresholdMethod method = ThresholdMethod::kAuto);

/// Builds the ordering and regime data from already computed thresholds.
ThresholdProfile profile_from_thresholds(const LiabilityNetwork& network, const ShockModel& shock, Vector qstar,
                                         const ClearingParams& params);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace netcomp
