#pragma once

#include "netcomp/clearing.hpp"
#include "netcomp/network.hpp"
#include "netcomp/risk.hpp"
#include "netcomp/thresholds.hpp"

#include <string>

namespace netcomp {

/// Σ of every entry, societal column included.
double gross_notional(const LiabilityNetwork& network);

enum class EntropyRange {
  kInterbank,  // j = 1..n
  kAll,        // j = 0..n
};

/// −Σ π_ij log π_ij (natural log, 0·log 0 = 0).
double entropy(const LiabilityNetwork& network, EntropyRange range = EntropyRange::kInterbank);

enum class StressField {
  kConstant,                // the same exposures for every candidate network
  kCollateralReinvestment,  // collateral freed by lower obligations is reinvested 80/20
};

struct SystemicRiskConfig {
  AggregationKind aggregation = AggregationKind::kExternalWealth;
  RiskMeasure measure{MeasureKind::kExpectedShortfall, 0.8};
  ShockModel shock;
  ClearingParams clearing;
  StressField field = StressField::kConstant;
  double riskless_share = 0.8;
  double risky_share = 0.2;
};

/// Exposures faced by `network`: b + 0.8μ(p̄_base − p̄_L), s + 0.2μ(p̄_base − p̄_L)
/// under collateral reinvestment, the configured shock otherwise.
ShockModel stressed_shock(const LiabilityNetwork& network, const LiabilityNetwork& base,
                          const SystemicRiskConfig& config);

double systemic_risk_objective(const LiabilityNetwork& network, const LiabilityNetwork& base,
                               const SystemicRiskConfig& config);

enum class ObjectiveKind { kGrossNotional, kEntropy, kSystemicRisk };

/// Objective f(L) to be minimized over a compression set.
class Objective {
 public:
  static Objective gross();
  static Objective entropy(EntropyRange range = EntropyRange::kInterbank);
  static Objective systemic_risk(SystemicRiskConfig config);

  ObjectiveKind kind() const noexcept { return kind_; }
  const SystemicRiskConfig& risk_config() const noexcept { return risk_; }
  EntropyRange entropy_range() const noexcept { return range_; }

  double evaluate(const LiabilityNetwork& network, const LiabilityNetwork& base) const;
  std::string describe() const;

 private:
  ObjectiveKind kind_ = ObjectiveKind::kGrossNotional;
  EntropyRange range_ = EntropyRange::kInterbank;
  SystemicRiskConfig risk_;
};

}  // namespace netcomp
