#include "netcomp/risk.hpp"

#include "netcomp/errors.hpp"
#include "netcomp/parallel.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace netcomp {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void check_es_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw ValidationError("expected shortfall needs gamma in [0,1), got " + format_double(gamma));
  }
}

void check_var_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ValidationError("value-at-risk needs gamma in [0,1], got " + format_double(gamma));
  }
}

Vector external_weights(const LiabilityNetwork& network) {
  const Vector pbar = network.total_obligations();
  Vector w = Vector::Zero(pbar.size());
  for (Eigen::Index i = 0; i < pbar.size(); ++i) {
    if (pbar(i) > 0.0) w(i) = network.societal(static_cast<std::size_t>(i)) / pbar(i);
  }
  return w;
}

// Aggregate within a known regime: the default set decides who is solvent.
double regime_aggregate(const Vector& v, const DefaultSet& z, const LiabilityNetwork& network,
                        AggregationKind kind) {
  const auto n = v.size();
  switch (kind) {
    case AggregationKind::kSolventCount:
      return static_cast<double>(z.size() - default_count(z));
    case AggregationKind::kSystemWealth:
      return v.sum();
    case AggregationKind::kExternalWealth: {
      const Vector w = external_weights(network);
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double shortfall = z[static_cast<std::size_t>(i)] ? std::max(-v(i), 0.0) : 0.0;
        total += network.societal(static_cast<std::size_t>(i)) - w(i) * shortfall;
      }
      return total;
    }
  }
  return 0.0;
}

// P(q <= c) and E[q 1{q <= c}] for the lognormal factor.
struct TailPiece {
  double probability;
  double moment;
};

TailPiece lower_piece(double c, const ShockModel& shock) {
  if (!(c > 0.0)) return {0.0, 0.0};
  if (std::isinf(c)) return {1.0, shock.growth()};
  const double vol = shock.volatility * std::sqrt(shock.horizon);
  const double d1 = (-std::log(c) + (shock.rate + 0.5 * shock.volatility * shock.volatility) * shock.horizon) / vol;
  const double d2 = d1 - vol;
  return {normal_cdf(-d2), shock.growth() * normal_cdf(-d1)};
}

// Pieces at min(boundary_k, q_{1−γ}) for k = 0..n+1. The cut itself is
// evaluated through Φ⁻¹(1−γ) directly so the masses telescope exactly.
std::vector<TailPiece> cut_pieces(const ThresholdProfile& profile, const ShockModel& shock, double gamma) {
  const double cut = lognormal_quantile(shock, 1.0 - gamma);
  TailPiece at_cut{1.0 - gamma, shock.growth()};
  if (gamma > 0.0) {
    const double vol = shock.volatility * std::sqrt(shock.horizon);
    at_cut.moment = shock.growth() * normal_cdf(normal_quantile(1.0 - gamma) - vol);
  }
  std::vector<TailPiece> pieces;
  pieces.reserve(profile.size() + 2);
  for (std::size_t k = 0; k <= profile.size() + 1; ++k) {
    const double b = profile.boundary(k);
    pieces.push_back(b >= cut ? at_cut : lower_piece(b, shock));
  }
  return pieces;
}

double infinite_level_aggregate(const ThresholdProfile& profile, const LiabilityNetwork& network,
                                AggregationKind kind) {
  Vector v = profile.intercepts[0];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (profile.slopes[0](i) > 0.0) v(i) = kInfinity;
  }
  return regime_aggregate(v, profile.default_sets[0], network, kind);
}

}  // namespace

void RiskMeasure::validate() const {
  switch (kind) {
    case MeasureKind::kValueAtRisk:
      check_var_gamma(gamma);
      break;
    case MeasureKind::kExpectedShortfall:
      check_es_gamma(gamma);
      break;
    default:
      break;
  }
}

AggregationKind parse_aggregation(const std::string& name) {
  const std::string s = lower(name);
  if (s == "solvent" || s == "count" || s == "solvent-count" || s == "#") return AggregationKind::kSolventCount;
  if (s == "system" || s == "wealth" || s == "system-wealth" || s == "n") return AggregationKind::kSystemWealth;
  if (s == "external" || s == "society" || s == "external-wealth" || s == "0") return AggregationKind::kExternalWealth;
  throw ValidationError("unknown aggregation '" + name + "' (expected solvent, system or external)");
}

MeasureKind parse_measure(const std::string& name) {
  const std::string s = lower(name);
  if (s == "var") return MeasureKind::kValueAtRisk;
  if (s == "es") return MeasureKind::kExpectedShortfall;
  if (s == "worst" || s == "worst-case") return MeasureKind::kWorstCase;
  if (s == "expectation" || s == "mean") return MeasureKind::kExpectation;
  throw ValidationError("unknown risk measure '" + name + "' (expected var, es, worst or expectation)");
}

std::string to_string(AggregationKind kind) {
  switch (kind) {
    case AggregationKind::kSolventCount:
      return "solvent";
    case AggregationKind::kSystemWealth:
      return "system";
    case AggregationKind::kExternalWealth:
      return "external";
  }
  return "?";
}

std::string to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kValueAtRisk:
      return "var";
    case MeasureKind::kExpectedShortfall:
      return "es";
    case MeasureKind::kWorstCase:
      return "worst";
    case MeasureKind::kExpectation:
      return "expectation";
  }
  return "?";
}

double aggregate(const Vector& wealths, const LiabilityNetwork& network, AggregationKind kind) {
  if (static_cast<std::size_t>(wealths.size()) != network.size()) {
    throw ValidationError("wealth vector length does not match the network");
  }
  DefaultSet z(network.size());
  for (Eigen::Index i = 0; i < wealths.size(); ++i) z[static_cast<std::size_t>(i)] = wealths(i) < 0.0;
  return regime_aggregate(wealths, z, network, kind);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (p <= 0.0) return -kInfinity;
  if (p >= 1.0) return kInfinity;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double lognormal_quantile(const ShockModel& shock, double level) {
  if (level <= 0.0) return 0.0;
  if (level >= 1.0) return kInfinity;
  const double mean = (shock.rate - 0.5 * shock.volatility * shock.volatility) * shock.horizon;
  return std::exp(mean + shock.volatility * std::sqrt(shock.horizon) * normal_quantile(level));
}

std::vector<double> regime_masses(const ThresholdProfile& profile, const ShockModel& shock, double gamma) {
  check_es_gamma(gamma);
  const auto pieces = cut_pieces(profile, shock, gamma);
  std::vector<double> masses(profile.size() + 1);
  for (std::size_t k = 0; k < masses.size(); ++k) masses[k] = pieces[k].probability - pieces[k + 1].probability;
  return masses;
}

double var_from_profile(const ThresholdProfile& profile, const LiabilityNetwork& network, const ShockModel& shock,
                        AggregationKind kind, double gamma) {
  check_var_gamma(gamma);
  const double t = lognormal_quantile(shock, 1.0 - gamma);
  if (std::isinf(t)) return -infinite_level_aggregate(profile, network, kind);
  const std::size_t k = profile.regime_of(t);
  return -regime_aggregate(profile.regime_wealths(k, t), profile.default_sets[k], network, kind);
}

double var_systematic(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                      AggregationKind kind, double gamma) {
  return var_from_profile(threshold_profile(network, shock, params), network, shock, kind, gamma);
}

double es_from_profile(const ThresholdProfile& profile, const LiabilityNetwork& network, const ShockModel& shock,
                       AggregationKind kind, double gamma) {
  check_es_gamma(gamma);
  const std::size_t n = profile.size();
  const auto pieces = cut_pieces(profile, shock, gamma);
  const Vector w = external_weights(network);
  const Vector pbar = network.total_obligations();
  double total = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double mass = pieces[k].probability - pieces[k + 1].probability;
    const double moment = pieces[k].moment - pieces[k + 1].moment;
    if (mass == 0.0 && moment == 0.0) continue;
    const DefaultSet& z = profile.default_sets[k];
    switch (kind) {
      case AggregationKind::kSolventCount:
        total += static_cast<double>(n - default_count(z)) * mass;
        break;
      case AggregationKind::kSystemWealth:
        total += profile.intercepts[k].sum() * mass + profile.slopes[k].sum() * moment;
        break;
      case AggregationKind::kExternalWealth:
        for (std::size_t i = 0; i < n; ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          double term = pbar(ii) * mass;
          if (z[i]) term += profile.intercepts[k](ii) * mass + profile.slopes[k](ii) * moment;
          total += w(ii) * term;
        }
        break;
    }
  }
  return -total / (1.0 - gamma);
}

double es_systematic(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                     AggregationKind kind, double gamma) {
  check_es_gamma(gamma);
  return es_from_profile(threshold_profile(network, shock, params), network, shock, kind, gamma);
}

double systematic_risk_from_profile(const ThresholdProfile& profile, const LiabilityNetwork& network,
                                    const ShockModel& shock, AggregationKind kind, const RiskMeasure& measure) {
  measure.validate();
  switch (measure.kind) {
    case MeasureKind::kValueAtRisk:
      return var_from_profile(profile, network, shock, kind, measure.gamma);
    case MeasureKind::kExpectedShortfall:
      return es_from_profile(profile, network, shock, kind, measure.gamma);
    case MeasureKind::kWorstCase:
      return var_from_profile(profile, network, shock, kind, 1.0);
    case MeasureKind::kExpectation:
      return es_from_profile(profile, network, shock, kind, 0.0);
  }
  return 0.0;
}

double systematic_risk(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                       AggregationKind kind, const RiskMeasure& measure) {
  measure.validate();
  return systematic_risk_from_profile(threshold_profile(network, shock, params), network, shock, kind, measure);
}

ScenarioSampler lognormal_sampler(const ShockModel& shock) {
  shock.validate();
  const double mean = (shock.rate - 0.5 * shock.volatility * shock.volatility) * shock.horizon;
  const double vol = shock.volatility * std::sqrt(shock.horizon);
  return [shock, mean, vol](std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return shock.exposure(std::exp(mean + vol * normal(rng)));
  };
}

ScenarioSampler constant_sampler(const Vector& endowments) {
  return [endowments](std::mt19937_64&) { return endowments; };
}

std::vector<std::vector<double>> sample_aggregates(const LiabilityNetwork& network, const ScenarioSampler& sampler,
                                                   const ClearingParams& params,
                                                   const std::vector<AggregationKind>& kinds, std::size_t n_samples,
                                                   std::uint64_t seed, const MonteCarloOptions& options) {
  if (options.batch_size == 0) throw ValidationError("Monte Carlo batch size must be positive");
  const ClearingSolver solver(network, params);
  std::vector<std::vector<double>> out(kinds.size(), std::vector<double>(n_samples));
  const std::size_t batches = (n_samples + options.batch_size - 1) / options.batch_size;
  parallel_for(batches, options.threads, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    const std::size_t end = std::min(n_samples, (b + 1) * options.batch_size);
    for (std::size_t s = b * options.batch_size; s < end; ++s) {
      const Vector v = solver.solve(sampler(rng)).wealths;
      for (std::size_t a = 0; a < kinds.size(); ++a) out[a][s] = aggregate(v, network, kinds[a]);
    }
  });
  return out;
}

MonteCarloEstimate tail_estimate(std::vector<double> samples, double gamma) {
  check_es_gamma(gamma);
  const std::size_t n = samples.size();
  const auto k = static_cast<std::size_t>(std::ceil((1.0 - gamma) * static_cast<double>(n) - 1e-9));
  if (k == 0) throw Error("empty tail: gamma too close to 1 for " + std::to_string(n) + " samples");
  if (k < n) {
    std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k - 1), samples.end());
  }
  const double cutoff = *std::max_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k));
  double mean = 0.0;
  for (std::size_t i = 0; i < k; ++i) mean += samples[i];
  mean /= static_cast<double>(k);
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) var += (samples[i] - mean) * (samples[i] - mean);
  var = k > 1 ? var / static_cast<double>(k - 1) : 0.0;
  const double tail_mass = static_cast<double>(k) / static_cast<double>(n);
  const double spread = mean - cutoff;
  const double se2 = (var + gamma * spread * spread) / (static_cast<double>(n) * tail_mass);
  MonteCarloEstimate est;
  est.estimate = -mean;
  est.standard_error = std::sqrt(std::max(se2, 0.0));
  est.samples = n;
  est.tail = k;
  return est;
}

MonteCarloEstimate es_monte_carlo(const LiabilityNetwork& network, const ScenarioSampler& sampler,
                                  const ClearingParams& params, AggregationKind kind, double gamma,
                                  std::size_t n_samples, std::uint64_t seed, const MonteCarloOptions& options) {
  check_es_gamma(gamma);
  if (n_samples < 1000) throw ValidationError("Monte Carlo needs at least 1000 samples");
  auto samples = sample_aggregates(network, sampler, params, {kind}, n_samples, seed, options);
  return tail_estimate(std::move(samples[0]), gamma);
}

}  // namespace netcomp
