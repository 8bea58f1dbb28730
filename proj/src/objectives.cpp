#include "netcomp/objectives.hpp"

#include "netcomp/errors.hpp"

#include <cmath>

namespace netcomp {

double gross_notional(const LiabilityNetwork& network) { return network.matrix().sum(); }

double entropy(const LiabilityNetwork& network, EntropyRange range) {
  const RelativeLiabilities rel = relative_liabilities(network);
  const Eigen::Index first = range == EntropyRange::kAll ? 0 : 1;
  double h = 0.0;
  for (Eigen::Index i = 0; i < rel.pi.rows(); ++i) {
    for (Eigen::Index j = first; j < rel.pi.cols(); ++j) {
      const double p = rel.pi(i, j);
      if (p > 0.0) h -= p * std::log(p);
    }
  }
  return h;
}

ShockModel stressed_shock(const LiabilityNetwork& network, const LiabilityNetwork& base,
                          const SystemicRiskConfig& config) {
  if (config.field == StressField::kConstant || config.clearing.mu == 0.0) return config.shock;
  if (network.size() != base.size()) throw ValidationError("network and base differ in size");
  const Vector freed = config.clearing.mu * (base.total_obligations() - network.total_obligations());
  ShockModel out = config.shock;
  out.riskless = (config.shock.riskless + config.riskless_share * freed).cwiseMax(0.0);
  out.risky = (config.shock.risky + config.risky_share * freed).cwiseMax(0.0);
  return out;
}

double systemic_risk_objective(const LiabilityNetwork& network, const LiabilityNetwork& base,
                               const SystemicRiskConfig& config) {
  return systematic_risk(network, stressed_shock(network, base, config), config.clearing, config.aggregation,
                         config.measure);
}

Objective Objective::gross() { return Objective{}; }

Objective Objective::entropy(EntropyRange range) {
  Objective o;
  o.kind_ = ObjectiveKind::kEntropy;
  o.range_ = range;
  return o;
}

Objective Objective::systemic_risk(SystemicRiskConfig config) {
  config.clearing.validate();
  config.measure.validate();
  config.shock.validate();
  Objective o;
  o.kind_ = ObjectiveKind::kSystemicRisk;
  o.risk_ = std::move(config);
  return o;
}

double Objective::evaluate(const LiabilityNetwork& network, const LiabilityNetwork& base) const {
  switch (kind_) {
    case ObjectiveKind::kGrossNotional:
      return gross_notional(network);
    case ObjectiveKind::kEntropy:
      return netcomp::entropy(network, range_);
    case ObjectiveKind::kSystemicRisk:
      return systemic_risk_objective(network, base, risk_);
  }
  return 0.0;
}

std::string Objective::describe() const {
  switch (kind_) {
    case ObjectiveKind::kGrossNotional:
      return "gross";
    case ObjectiveKind::kEntropy:
      return std::string("entropy(") + (range_ == EntropyRange::kAll ? "all" : "interbank") + ")";
    case ObjectiveKind::kSystemicRisk: {
      std::string s = to_string(risk_.measure.kind);
      if (risk_.measure.kind == MeasureKind::kValueAtRisk || risk_.measure.kind == MeasureKind::kExpectedShortfall) {
        s += "(" + format_double(risk_.measure.gamma) + ")";
      }
      s += "/" + to_string(risk_.aggregation);
      s += risk_.field == StressField::kConstant ? "/constant" : "/reinvest";
      return s;
    }
  }
  return "?";
}

}  // namespace netcomp
