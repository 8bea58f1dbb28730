#pragma once

#include "netcomp/clearing.hpp"
#include "netcomp/network.hpp"
#include "netcomp/thresholds.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace netcomp {

enum class AggregationKind {
  kSolventCount,    // Λ^#: number of banks with V_i >= 0
  kSystemWealth,    // Λ^N: Σ V_i
  kExternalWealth,  // Λ^0: payments reaching society
};

enum class MeasureKind { kValueAtRisk, kExpectedShortfall, kWorstCase, kExpectation };

struct RiskMeasure {
  MeasureKind kind = MeasureKind::kExpectedShortfall;
  double gamma = 0.0;  // ignored by worst-case and expectation

  void validate() const;
};

AggregationKind parse_aggregation(const std::string& name);
MeasureKind parse_measure(const std::string& name);
std::string to_string(AggregationKind kind);
std::string to_string(MeasureKind kind);

double aggregate(const Vector& wealths, const LiabilityNetwork& network, AggregationKind kind);

double normal_cdf(double x);
double normal_quantile(double p);

/// q_level with P(q <= q_level) = level; 0 at level 0 and +inf at level 1.
double lognormal_quantile(const ShockModel& shock, double level);

/// P(q in regime k and q <= q_{1−γ}) for k = 0..n. Sums to 1−γ.
std::vector<double> regime_masses(const ThresholdProfile& profile, const ShockModel& shock, double gamma);

/// −Λ(C(q_{1−γ}), L) read off the regime containing the quantile.
double var_systematic(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                      AggregationKind kind, double gamma);
double var_from_profile(const ThresholdProfile& profile, const LiabilityNetwork& network, const ShockModel& shock,
                        AggregationKind kind, double gamma);

/// −E[Λ | q <= q_{1−γ}] in closed form; γ in [0, 1).
double es_systematic(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                     AggregationKind kind, double gamma);
double es_from_profile(const ThresholdProfile& profile, const LiabilityNetwork& network, const ShockModel& shock,
                       AggregationKind kind, double gamma);

/// Any supported measure under the systematic shock model. Worst case is
/// VaR at γ = 1 (factor level 0); expectation is ES at γ = 0.
double systematic_risk(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                       AggregationKind kind, const RiskMeasure& measure);
double systematic_risk_from_profile(const ThresholdProfile& profile, const LiabilityNetwork& network,
                                    const ShockModel& shock, AggregationKind kind, const RiskMeasure& measure);

/// Draws one endowment vector.
using ScenarioSampler = std::function<Vector(std::mt19937_64&)>;

ScenarioSampler lognormal_sampler(const ShockModel& shock);
ScenarioSampler constant_sampler(const Vector& endowments);

struct MonteCarloOptions {
  std::size_t batch_size = 16384;  // fixed batch plan; the estimate depends on it, not on threads
  unsigned threads = 1;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::size_t tail = 0;
};

/// Aggregates of n_samples scenarios, one vector per requested aggregation.
/// Batch b draws from a generator seeded with derive_seed(seed, b).
std::vector<std::vector<double>> sample_aggregates(const LiabilityNetwork& network, const ScenarioSampler& sampler,
                                                   const ClearingParams& params,
                                                   const std::vector<AggregationKind>& kinds, std::size_t n_samples,
                                                   std::uint64_t seed, const MonteCarloOptions& options = {});

/// ES from samples: −mean of the ⌈(1−γ)N⌉ smallest values, with the
/// asymptotic standard error of the tail mean.
MonteCarloEstimate tail_estimate(std::vector<double> samples, double gamma);

MonteCarloEstimate es_monte_carlo(const LiabilityNetwork& network, const ScenarioSampler& sampler,
                                  const ClearingParams& params, AggregationKind kind, double gamma,
                                  std::size_t n_samples, std::uint64_t seed, const MonteCarloOptions& options = {});

}  // namespace netcomp
