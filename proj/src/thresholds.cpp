#include "netcomp/thresholds.hpp"

#include "netcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>

namespace netcomp {

namespace {

void check_vector(const Vector& v, std::size_t n, const char* name) {
  if (static_cast<std::size_t>(v.size()) != n) {
    throw ValidationError(std::string(name) + " has " + std::to_string(v.size()) + " entries, network has " +
                          std::to_string(n) + " banks");
  }
}

// Wealth intercept and slope in t for default set z.
struct Line {
  Vector intercept;
  Vector slope;
};

Line regime_line(const AffineWealth& aw, const ShockModel& shock) {
  return {aw.Delta * (shock.riskless * shock.growth()) - aw.delta, aw.Delta * shock.risky};
}

}  // namespace

void ShockModel::validate() const {
  if (riskless.size() != risky.size()) throw ValidationError("riskless and risky holdings differ in length");
  for (Eigen::Index i = 0; i < risky.size(); ++i) {
    if (!(risky(i) >= 0.0) || !std::isfinite(risky(i))) {
      throw ValidationError("risky holding of bank " + std::to_string(i + 1) + " must be finite and nonnegative");
    }
    if (!(riskless(i) >= 0.0) || !std::isfinite(riskless(i))) {
      throw ValidationError("riskless holding of bank " + std::to_string(i + 1) + " must be finite and nonnegative");
    }
  }
  if (!std::isfinite(rate)) throw ValidationError("rate must be finite");
  if (!(volatility > 0.0) || !std::isfinite(volatility)) throw ValidationError("volatility must be positive");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("horizon must be positive");
}

double ShockModel::growth() const { return std::exp(rate * horizon); }

Vector ShockModel::exposure(double t) const { return riskless * growth() + risky * t; }

Vector solvency_thresholds(const LiabilityNetwork& network, const ShockModel& shock, const ClearingParams& params,
                           const ThresholdOptions& options) {
  shock.validate();
  const std::size_t n = network.size();
  check_vector(shock.risky, n, "risky holdings");
  const ClearingSolver solver(network, params);
  const auto wealth_at = [&](double t) { return solver.solve(shock.exposure(t)).wealths; };

  Vector qstar = Vector::Constant(static_cast<Eigen::Index>(n), kInfinity);
  Vector lo = Vector::Zero(static_cast<Eigen::Index>(n));
  Vector hi = Vector::Constant(static_cast<Eigen::Index>(n), kInfinity);

  std::vector<std::size_t> open;
  const Vector v0 = wealth_at(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (v0(static_cast<Eigen::Index>(i)) >= 0.0) {
      qstar(static_cast<Eigen::Index>(i)) = 0.0;
    } else {
      open.push_back(i);
    }
  }

  // Doubling search for an upper bracket.
  double prev = 0.0;
  std::vector<std::size_t> unbracketed = open;
  for (double t = 1.0; !unbracketed.empty() && t <= options.bracket_cap; prev = t, t *= 2.0) {
    const Vector v = wealth_at(t);
    std::vector<std::size_t> still;
    for (std::size_t i : unbracketed) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (v(ii) >= 0.0) {
        lo(ii) = prev;
        hi(ii) = t;
      } else {
        still.push_back(i);
      }
    }
    unbracketed = std::move(still);
  }

  // Bisection; V_i is nondecreasing in t, so hi stays on the solvent side.
  for (std::size_t i : open) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (!std::isfinite(hi(ii))) continue;
    double a = lo(ii);
    double b = hi(ii);
    for (int step = 0; step < 2000 && b - a > options.relative_tolerance * b; ++step) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (wealth_at(mid)(ii) >= 0.0) {
        b = mid;
      } else {
        a = mid;
      }
    }
    qstar(ii) = b;
  }
  return qstar;
}

Vector solvency_thresholds_regime_walk(const LiabilityNetwork& network, const ShockModel& shock,
                                       const ClearingParams& params) {
  params.validate();
  shock.validate();
  const std::size_t n = network.size();
  check_vector(shock.risky, n, "risky holdings");
  const RelativeLiabilities rel = relative_liabilities(network);
  const double slope_floor = 1e-13 * std::max(1.0, shock.risky.lpNorm<Eigen::Infinity>());

  Vector qstar = Vector::Zero(static_cast<Eigen::Index>(n));
  DefaultSet z(n, false);
  std::size_t assigned = 0;
  double t_cur = kInfinity;
  while (assigned < n) {
    const Line line = regime_line(affine_matrices(z, rel, params), shock);
    std::vector<double> root(n, -kInfinity);
    double t_next = -kInfinity;
    for (std::size_t i = 0; i < n; ++i) {
      if (z[i]) continue;
      const auto ii = static_cast<Eigen::Index>(i);
      const double a = line.intercept(ii);
      const double c = line.slope(ii);
      if (c > slope_floor) {
        root[i] = -a / c;
      } else {
        root[i] = a >= 0.0 ? -kInfinity : kInfinity;
      }
      t_next = std::max(t_next, root[i]);
    }
    const auto close_to = [](double r, double t) { return std::isinf(t) ? r == t : r >= t * (1.0 - 1e-12); };

    // Banks pushed under water by the defaults just added at t_cur.
    std::vector<std::size_t> joining;
    for (std::size_t i = 0; i < n; ++i) {
      if (!z[i] && (root[i] >= t_cur || close_to(root[i], t_cur))) joining.push_back(i);
    }
    double level = t_cur;
    if (joining.empty()) {
      if (t_next <= 0.0) break;
      level = t_next;
      for (std::size_t i = 0; i < n; ++i) {
        if (!z[i] && close_to(root[i], t_next)) joining.push_back(i);
      }
    }
    for (std::size_t i : joining) {
      qstar(static_cast<Eigen::Index>(i)) = level;
      z[i] = true;
      ++assigned;
    }
    t_cur = level;
  }
  return qstar;
}

double ThresholdProfile::boundary(std::size_t k) const {
  if (k == 0) return kInfinity;
  if (k > size()) return 0.0;
  return qstar(static_cast<Eigen::Index>(order[k - 1]));
}

std::size_t ThresholdProfile::regime_of(double t) const {
  for (std::size_t k = 0; k < size(); ++k) {
    if (t >= boundary(k + 1)) return k;
  }
  return size();
}

ThresholdProfile profile_from_thresholds(const LiabilityNetwork& network, const ShockModel& shock, Vector qstar,
                                         const ClearingParams& params) {
  const std::size_t n = network.size();
  check_vector(qstar, n, "threshold vector");
  ThresholdProfile prof;
  prof.qstar = std::move(qstar);
  prof.order.resize(n);
  std::iota(prof.order.begin(), prof.order.end(), std::size_t{0});
  std::stable_sort(prof.order.begin(), prof.order.end(), [&](std::size_t a, std::size_t b) {
    return prof.qstar(static_cast<Eigen::Index>(a)) > prof.qstar(static_cast<Eigen::Index>(b));
  });

  const RelativeLiabilities rel = relative_liabilities(network);
  std::map<DefaultSet, std::pair<AffineWealth, bool>> cache;
  std::unique_ptr<ClearingSolver> solver;
  const auto wealth_at = [&](double t) {
    if (!solver) solver = std::make_unique<ClearingSolver>(network, params);
    return solver->solve(shock.exposure(t)).wealths;
  };
  const auto fitted_line = [&](double t0, double t1) {
    const Vector v0 = wealth_at(t0);
    const Vector v1 = wealth_at(t1);
    const Vector slope = (v1 - v0) / (t1 - t0);
    return Line{v0 - slope * t0, slope};
  };

  for (std::size_t k = 0; k <= n; ++k) {
    DefaultSet z(n, false);
    if (k > 0) {
      const double level = prof.boundary(k);
      for (std::size_t i = 0; i < n; ++i) z[i] = prof.qstar(static_cast<Eigen::Index>(i)) >= level;
    }
    auto it = cache.find(z);
    if (it == cache.end()) {
      std::pair<AffineWealth, bool> entry{AffineWealth{}, false};
      try {
        entry.first = affine_matrices(z, rel, params);
        entry.second = true;
      } catch (const SingularSystemError&) {
        entry.second = false;
      }
      it = cache.emplace(z, std::move(entry)).first;
    }
    const double upper = prof.boundary(k);
    const double lower = prof.boundary(k + 1);
    Line line;
    if (it->second.second) {
      line = regime_line(it->second.first, shock);
    } else if (upper > lower) {
      // Probe strictly inside the interval.
      const double t0 = std::isinf(upper) ? lower + 1.0 : lower + 0.25 * (upper - lower);
      const double t1 = std::isinf(upper) ? lower + 2.0 : lower + 0.75 * (upper - lower);
      line = fitted_line(t0, t1);
    } else {
      // Empty interval; carries no probability mass.
      line = Line{wealth_at(std::isfinite(lower) ? lower : 0.0), Vector::Zero(static_cast<Eigen::Index>(n))};
    }
    prof.default_sets.push_back(z);
    prof.regimes.push_back(it->second.first);
    prof.intercepts.push_back(std::move(line.intercept));
    prof.slopes.push_back(std::move(line.slope));
  }
  return prof;
}

ThresholdProfile threshold_profile(const LiabilityNetwork& network, const ShockModel& shock,
                                   const ClearingParams& params, ThresholdMethod method) {
  Vector qstar;
  switch (method) {
    case ThresholdMethod::kBisection:
      qstar = solvency_thresholds(network, shock, params);
      break;
    case ThresholdMethod::kRegimeWalk:
      qstar = solvency_thresholds_regime_walk(network, shock, params);
      break;
    case ThresholdMethod::kAuto:
      try {
        qstar = solvency_thresholds_regime_walk(network, shock, params);
      } catch (const SingularSystemError&) {
        qstar = solvency_thresholds(network, shock, params);
      }
      break;
  }
  return profile_from_thresholds(network, shock, std::move(qstar), params);
}

}  // namespace netcomp
