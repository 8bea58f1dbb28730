#include "netcomp/casestudies.hpp"

#include "netcomp/errors.hpp"
#include "netcomp/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace netcomp {

// ---------------------------------------------------------------------------
// Three-bank system

namespace {

struct ThreeBankTerms {
  double L12, L13, L21, L23, L31, L32, y;
  double x1, x2, x3;
  double p1, p2, p3;
  double ax, aL;
};

ThreeBankTerms terms(const ThreeBankParams& params, const ClearingParams& clearing) {
  params.validate();
  clearing.validate();
  ThreeBankTerms t{};
  t.L12 = t.L23 = t.L31 = params.lambda;
  t.L13 = t.L32 = t.L21 = params.xi;
  t.y = params.y;
  t.x1 = params.x[0];
  t.x2 = params.x[1];
  t.x3 = params.x[2];
  t.p1 = t.L12 + t.L13 + t.y;
  t.p2 = t.L21 + t.L23 + t.y;
  t.p3 = t.L31 + t.L32 + t.y;
  t.ax = clearing.alpha_x;
  t.aL = clearing.alpha_L;
  return t;
}

}  // namespace

ShockModel three_bank_shock(const ThreeBankParams& params, double volatility) {
  ShockModel shock;
  shock.riskless = Vector::Zero(3);
  shock.risky = Vector(3);
  for (int i = 0; i < 3; ++i) shock.risky(i) = params.x[static_cast<std::size_t>(i)];
  shock.volatility = volatility;
  return shock;
}

bool three_bank_condition(const ThreeBankParams& params, const ClearingParams& clearing) {
  const ThreeBankTerms t = terms(params, clearing);
  const double lhs = ((1.0 - t.aL) * (t.L12 + t.L13) + t.y) * (t.L12 * t.x3 - t.L13 * t.x2) +
                     t.y * (t.L12 + t.L13 + t.y) * (t.x3 - t.x2) + t.ax * t.y * (t.L13 - t.L12) * t.x1;
  return lhs >= 0.0;
}

std::array<double, 3> three_bank_thresholds(const ThreeBankParams& params, const ClearingParams& clearing) {
  if (clearing.mu != 0.0) throw ValidationError("three-bank closed forms require mu = 0");
  const ThreeBankTerms t = terms(params, clearing);
  const double aL = t.aL, ax = t.ax;
  const double q1 = t.y / t.x1;
  double q2 = 0.0;
  double q3 = 0.0;
  if (three_bank_condition(params, clearing)) {
    q2 = std::min(q1, ((t.L12 + t.y) * (t.L12 + t.L13 + t.y) - aL * t.L12 * (t.L12 + t.L13)) /
                          (ax * t.L12 * t.x1 + (t.L12 + t.L13 + t.y) * t.x2));
    const double det = t.p1 * t.p2 - aL * aL * t.L12 * t.L21;
    const double num = t.p3 * det - aL * (t.L13 * (aL * t.L32 * t.L21 + t.p2 * t.L31) +
                                          t.L23 * (aL * t.L31 * t.L12 + t.p1 * t.L32));
    const double den = ax * (t.p2 * t.L13 + aL * t.L12 * t.L23) * t.x1 +
                       ax * (t.p1 * t.L23 + aL * t.L21 * t.L13) * t.x2 + det * t.x3;
    q3 = std::min(q2, num / den);
  } else {
    q3 = std::min(q1, ((t.L13 + t.y) * (t.L12 + t.L13 + t.y) - aL * t.L13 * (t.L12 + t.L13)) /
                          (ax * t.L13 * t.x1 + (t.L12 + t.L13 + t.y) * t.x3));
    const double det = t.p1 * t.p3 - aL * aL * t.L13 * t.L31;
    const double num = t.p2 * det - aL * (t.L12 * (aL * t.L23 * t.L31 + t.p3 * t.L21) +
                                          t.L32 * (aL * t.L21 * t.L13 + t.p1 * t.L23));
    const double den = ax * (t.p3 * t.L12 + aL * t.L13 * t.L32) * t.x1 + det * t.x2 +
                       ax * (t.p1 * t.L32 + aL * t.L31 * t.L12) * t.x3;
    q2 = std::min(q3, num / den);
  }
  return {q1, q2, q3};
}

std::string to_string(SpecialNetwork kind) {
  switch (kind) {
    case SpecialNetwork::kCompletelyConnected:
      return "complete";
    case SpecialNetwork::kRing123:
      return "ring123";
    case SpecialNetwork::kRing132:
      return "ring132";
    case SpecialNetwork::kCompressed:
      return "compressed";
  }
  return "?";
}

SpecialNetwork parse_special_network(const std::string& name) {
  for (auto kind : kSpecialNetworks) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "cc" || name == "completely-connected") return SpecialNetwork::kCompletelyConnected;
  throw ValidationError("unknown special network '" + name + "' (complete, ring123, ring132, compressed)");
}

ThreeBankParams special_network_params(SpecialNetwork kind, double y) {
  ThreeBankParams p;
  p.x = {1.0, 2.0, 3.0};
  p.y = y;
  switch (kind) {
    case SpecialNetwork::kCompletelyConnected:
      p.lambda = p.xi = 0.5;
      break;
    case SpecialNetwork::kRing123:
      p.lambda = 1.0;
      p.xi = 0.0;
      break;
    case SpecialNetwork::kRing132:
      p.lambda = 0.0;
      p.xi = 1.0;
      break;
    case SpecialNetwork::kCompressed:
      p.lambda = p.xi = 0.0;
      break;
  }
  return p;
}

std::vector<double> default_y_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 30; ++k) grid.push_back(k / 10.0);
  return grid;
}

bool FragilityReport::all_cc_below_ring123() const {
  return std::all_of(rows.begin(), rows.end(), [](const FragilityRow& r) { return r.cc_below_ring123; });
}

bool FragilityReport::all_cc_above_ring132() const {
  return std::all_of(rows.begin(), rows.end(), [](const FragilityRow& r) { return r.cc_above_ring132; });
}

bool FragilityReport::all_compressed_lowest() const {
  return std::all_of(rows.begin(), rows.end(), [](const FragilityRow& r) { return r.compressed_lowest; });
}

std::string FragilityReport::to_csv() const {
  std::ostringstream out;
  out << "y";
  for (auto kind : kSpecialNetworks) {
    for (int b = 1; b <= 3; ++b) out << ",q" << b << "_" << to_string(kind);
  }
  out << ",cc_below_ring123,cc_above_ring132,compressed_lowest\n";
  for (const FragilityRow& r : rows) {
    out << format_double(r.y);
    for (const auto& q : r.q) {
      for (double v : q) out << "," << format_double(v);
    }
    out << "," << r.cc_below_ring123 << "," << r.cc_above_ring132 << "," << r.compressed_lowest << "\n";
  }
  return out.str();
}

FragilityReport robust_fragility_report(const std::vector<double>& y_grid, const ClearingParams& clearing) {
  if (y_grid.empty()) throw ValidationError("y grid must not be empty");
  FragilityReport report;
  report.clearing = clearing;
  constexpr double tol = 1e-12;
  for (double y : y_grid) {
    FragilityRow row;
    row.y = y;
    for (std::size_t k = 0; k < kSpecialNetworks.size(); ++k) {
      row.q[k] = three_bank_thresholds(special_network_params(kSpecialNetworks[k], y), clearing);
    }
    const auto& cc = row.q[0];
    const auto& r123 = row.q[1];
    const auto& r132 = row.q[2];
    const auto& comp = row.q[3];
    row.cc_below_ring123 = cc[1] <= r123[1] + tol;
    row.cc_above_ring132 = cc[1] + tol >= std::max(r132[1], r132[2]);
    const double second_comp = std::max(comp[1], comp[2]);
    const double third_comp = std::min(comp[1], comp[2]);
    row.compressed_lowest = true;
    for (std::size_t k = 0; k + 1 < kSpecialNetworks.size(); ++k) {
      const auto& q = row.q[k];
      if (std::max(q[1], q[2]) + tol < second_comp || std::min(q[1], q[2]) + tol < third_comp) {
        row.compressed_lowest = false;
      }
    }
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// EBA-style calibration

void EbaBalanceSheet::validate() const {
  const auto finite_nonneg = [&](double v, const char* what) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("bank '" + name + "': " + what + " must be finite and nonnegative");
    }
  };
  finite_nonneg(total_assets, "total assets");
  finite_nonneg(capital, "capital");
  finite_nonneg(interbank_liabilities, "interbank liabilities");
  if (total_assets + 1e-9 * std::max(1.0, total_assets) < interbank_liabilities + capital) {
    throw ValidationError("bank '" + name + "': total assets below interbank liabilities plus capital");
  }
}

std::vector<EbaBalanceSheet> synthetic_eba_sheets(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ValidationError("need at least one bank");
  std::mt19937_64 rng(seed);
  std::lognormal_distribution<double> assets(std::log(2.0e5), 0.9);
  std::uniform_real_distribution<double> cap(0.02, 0.06);
  std::uniform_real_distribution<double> inter(0.05, 0.2);
  std::vector<EbaBalanceSheet> sheets(n);
  double total_inter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = sheets[i];
    s.name = "B" + std::to_string(i + 1);
    s.total_assets = std::round(assets(rng));
    s.capital = std::round(cap(rng) * s.total_assets);
    s.interbank_liabilities = std::round(inter(rng) * s.total_assets);
    total_inter += s.interbank_liabilities;
  }
  // Keep every bank's interbank total below that of all the others combined so
  // the margins admit a matrix with zero diagonal.
  if (n > 1) {
    for (auto& s : sheets) {
      const double cap_share = 0.4 * total_inter;
      if (s.interbank_liabilities > cap_share) s.interbank_liabilities = std::round(cap_share);
    }
  } else {
    sheets[0].interbank_liabilities = 0.0;
  }
  return sheets;
}

std::vector<EbaBalanceSheet> parse_eba_sheets(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<EbaBalanceSheet> sheets;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) {
      const auto a = f.find_first_not_of(" \t");
      const auto b = f.find_last_not_of(" \t");
      fields.push_back(a == std::string::npos ? "" : f.substr(a, b - a + 1));
    }
    if (!header) {
      header = true;
      if (fields.size() != 4 || fields[0] != "name" || fields[1] != "total_assets" || fields[2] != "capital" ||
          fields[3] != "interbank_liabilities") {
        throw ParseError("line " + std::to_string(line_no) +
                         ": expected header name,total_assets,capital,interbank_liabilities");
      }
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " + std::to_string(fields.size()));
    }
    EbaBalanceSheet s;
    s.name = fields[0];
    try {
      std::size_t used = 0;
      const auto num = [&](const std::string& v) {
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
      };
      s.total_assets = num(fields[1]);
      s.capital = num(fields[2]);
      s.interbank_liabilities = num(fields[3]);
    } catch (const std::exception&) {
      throw ParseError("line " + std::to_string(line_no) + ": malformed number");
    }
    s.validate();
    sheets.push_back(std::move(s));
  }
  if (!header) throw ParseError("empty balance-sheet file");
  return sheets;
}

std::vector<EbaBalanceSheet> load_eba_sheets(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_eba_sheets(buf.str());
}

std::string eba_sheets_to_csv(const std::vector<EbaBalanceSheet>& sheets) {
  std::ostringstream out;
  out << "name,total_assets,capital,interbank_liabilities\n";
  for (const auto& s : sheets) {
    out << s.name << "," << format_double(s.total_assets) << "," << format_double(s.capital) << ","
        << format_double(s.interbank_liabilities) << "\n";
  }
  return out.str();
}

namespace {

double margin_error(const Matrix& m, const Vector& target) {
  double err = 0.0;
  const Vector rows = m.rowwise().sum();
  const Vector cols = m.colwise().sum().transpose();
  for (Eigen::Index i = 0; i < target.size(); ++i) {
    const double scale = std::max(target(i), 1e-300);
    if (target(i) == 0.0) {
      err = std::max({err, std::abs(rows(i)), std::abs(cols(i))});
    } else {
      err = std::max({err, std::abs(rows(i) - target(i)) / scale, std::abs(cols(i) - target(i)) / scale});
    }
  }
  return err;
}

// Random support at the target density; every bank with a positive total gets
// at least one outgoing and one incoming entry.
Matrix draw_pattern(const Vector& margin, double density, std::mt19937_64& rng) {
  const auto n = margin.size();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::exponential_distribution<double> weight(1.0);
  Matrix m = Matrix::Zero(n, n);
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (margin(i) > 0.0) active.push_back(i);
  }
  for (auto i : active) {
    for (auto j : active) {
      if (i != j && u(rng) < density) m(i, j) = weight(rng);
    }
  }
  const auto pick_other = [&](Eigen::Index i) {
    Eigen::Index j = i;
    while (j == i) j = active[static_cast<std::size_t>(u(rng) * static_cast<double>(active.size())) % active.size()];
    return j;
  };
  for (auto i : active) {
    if (m.row(i).sum() == 0.0) m(i, pick_other(i)) = weight(rng);
    if (m.col(i).sum() == 0.0) m(pick_other(i), i) = weight(rng);
  }
  return m;
}

}  // namespace

EbaCalibration eba_calibrate(const std::vector<EbaBalanceSheet>& sheets, double mu,
                             const EbaCalibrationOptions& options) {
  if (sheets.empty()) throw ValidationError("no balance sheets given");
  if (!(mu >= 0.0 && mu <= 1.0)) throw ValidationError("mu must lie in [0,1]");
  if (!(options.sparsity > 0.0 && options.sparsity <= 1.0)) throw ValidationError("sparsity must lie in (0,1]");
  const auto n = static_cast<Eigen::Index>(sheets.size());
  Vector assets(n), capital(n), inter(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = sheets[static_cast<std::size_t>(i)];
    s.validate();
    assets(i) = s.total_assets;
    capital(i) = s.capital;
    inter(i) = s.interbank_liabilities;
  }
  const double total = inter.sum();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (inter(i) > 0.0 && inter(i) > total - inter(i) + 1e-12 * total) {
      throw ValidationError("interbank margins infeasible: bank '" + sheets[static_cast<std::size_t>(i)].name +
                            "' owes more than all other banks combined can receive");
    }
  }

  EbaCalibration out;
  std::mt19937_64 rng(options.seed);
  Matrix fitted;
  bool ok = n == 1 || total == 0.0;
  if (ok) fitted = Matrix::Zero(n, n);
  double best_err = kInfinity;
  for (std::size_t attempt = 0; !ok && attempt <= options.max_redraws; ++attempt) {
    // Each redraw moves the density towards a full pattern; the last one is full.
    const double share = options.max_redraws == 0 ? 0.0 : static_cast<double>(attempt) / options.max_redraws;
    Matrix m = draw_pattern(inter, options.sparsity + (1.0 - options.sparsity) * share, rng);
    double err = margin_error(m, inter);
    double prev = kInfinity;
    for (std::size_t sweep = 0; sweep < options.max_sweeps && err > options.margin_tolerance; ++sweep) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double c = m.col(j).sum();
        if (c > 0.0) m.col(j) *= inter(j) / c;
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double r = m.row(i).sum();
        if (r > 0.0) m.row(i) *= inter(i) / r;
      }
      err = margin_error(m, inter);
      // Stalled: the pattern cannot carry the margins.
      if (sweep % 500 == 499) {
        if (err > 0.5 * prev) break;
        prev = err;
      }
    }
    if (err <= options.margin_tolerance) {
      fitted = std::move(m);
      out.margin_error = err;
      ok = true;
    } else {
      best_err = std::min(best_err, err);
      ++out.redraws;
    }
  }
  if (!ok) {
    throw ConvergenceError("interbank margins could not be fitted after " + std::to_string(options.max_redraws) +
                               " redraws",
                           best_err);
  }

  const Vector row_sums = fitted.rowwise().sum();
  Vector society(n);
  for (Eigen::Index i = 0; i < n; ++i) society(i) = std::max(0.0, assets(i) - row_sums(i) - capital(i));
  out.network = LiabilityNetwork::from_blocks(fitted, society);
  const Vector pbar = out.network.total_obligations();
  const Vector external = assets - row_sums - mu * pbar;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (external(i) < 0.0) {
      throw ValidationError("mu = " + format_double(mu) + " leaves bank '" + sheets[static_cast<std::size_t>(i)].name +
                            "' with negative external assets");
    }
  }
  out.shock.riskless = 0.8 * external;
  out.shock.risky = 0.2 * external;
  out.shock.rate = 0.0;
  out.shock.volatility = options.volatility;
  out.shock.horizon = 1.0;
  return out;
}

const std::vector<CompressionScenario>& eba_scenarios() {
  static const std::vector<CompressionScenario> scenarios{
      {"Bilateral", CompressionKind::kBilateral, false},
      {"Conservative", CompressionKind::kConservative, false},
      {"Nonconservative-0", CompressionKind::kNonconservative, true},
      {"Nonconservative", CompressionKind::kNonconservative, false},
  };
  return scenarios;
}

std::vector<EbaTableRow> eba_compression_table(const std::vector<EbaBalanceSheet>& sheets,
                                               const EbaTableOptions& options) {
  std::vector<EbaTableRow> rows;
  for (double mu : options.mus) {
    const EbaCalibration cal = eba_calibrate(sheets, mu, options.calibration);
    SystemicRiskConfig cfg;
    cfg.aggregation = options.aggregation;
    cfg.measure = RiskMeasure{MeasureKind::kExpectedShortfall, options.gamma};
    cfg.shock = cal.shock;
    cfg.clearing = ClearingParams{mu, options.alpha_x, options.alpha_L};
    cfg.field = StressField::kCollateralReinvestment;
    const Objective objective = Objective::systemic_risk(cfg);

    EbaTableRow row;
    row.mu = mu;
    row.original = objective.evaluate(cal.network, cal.network);
    for (const auto& scenario : eba_scenarios()) {
      ConstraintSpec spec{cal.network, scenario.kind, scenario.fix_society};
      EbaTableCell cell;
      cell.scenario = scenario;
      cell.maximal = objective.evaluate(maximal_compression(spec), cal.network);
      const GAResult ga = ga_optimize(objective, spec, options.ga);
      cell.optimal = ga.best_value;
      cell.generations = ga.generations;
      row.cells.push_back(cell);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string eba_table_csv(const std::vector<EbaTableRow>& rows) {
  std::ostringstream out;
  out << "mu,compression,original";
  for (const auto& s : eba_scenarios()) out << "," << s.label;
  out << "\n";
  for (const auto& row : rows) {
    for (int which = 0; which < 2; ++which) {
      out << format_double(row.mu) << "," << (which == 0 ? "Maximal" : "Optimal") << ","
          << format_double(row.original);
      for (const auto& cell : row.cells) {
        out << "," << format_double((which == 0 ? cell.maximal : cell.optimal) - row.original);
      }
      out << "\n";
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Subset-sum reduction instances

long long SubsetSumInstance::K() const { return std::accumulate(S.begin(), S.end(), 0LL); }

void SubsetSumInstance::validate() const {
  if (S.empty()) throw ValidationError("subset-sum instance needs at least one integer");
  for (long long k : S) {
    if (k <= 0) throw ValidationError("subset-sum integers must be positive");
  }
  if (!(theta > 0 && theta < K())) throw ValidationError("target must satisfy 0 < theta < K");
}

SubsetSumModel parse_subset_sum_model(const std::string& name) {
  if (name == "rerouting") return SubsetSumModel::kRerouting;
  if (name == "conservative") return SubsetSumModel::kConservative;
  throw ValidationError("unknown subset-sum model '" + name + "' (rerouting, conservative)");
}

std::string to_string(SubsetSumModel model) {
  return model == SubsetSumModel::kRerouting ? "rerouting" : "conservative";
}

std::size_t subset_sum_periphery_index(SubsetSumModel model, std::size_t i) {
  return (model == SubsetSumModel::kRerouting ? 2 : 3) + i;
}

LiabilityNetwork subset_sum_assignment(const SubsetSumInstance& instance, SubsetSumModel model,
                                       const std::vector<double>& x) {
  instance.validate();
  const std::size_t n = instance.S.size();
  if (x.size() != n) throw ValidationError("assignment size differs from the instance size");
  const std::size_t offset = subset_sum_periphery_index(model, 0);
  const std::size_t c1 = offset - 2;
  const std::size_t c2 = offset - 1;
  const auto banks = static_cast<Eigen::Index>(offset + n);
  Matrix inter = Matrix::Zero(banks, banks);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<double>(instance.S[i]);
    const auto p = static_cast<Eigen::Index>(offset + i);
    inter(p, static_cast<Eigen::Index>(c1)) = x[i] * k;
    inter(p, static_cast<Eigen::Index>(c2)) = (1.0 - x[i]) * k;
  }
  return LiabilityNetwork::from_blocks(inter, Vector::Zero(banks));
}

LiabilityNetwork subset_sum_network(const SubsetSumInstance& instance, SubsetSumModel model) {
  instance.validate();
  const std::size_t n = instance.S.size();
  if (model == SubsetSumModel::kRerouting) {
    return subset_sum_assignment(instance, model, std::vector<double>(n, instance.alpha()));
  }
  const auto banks = static_cast<Eigen::Index>(3 + n);
  Matrix inter = Matrix::Zero(banks, banks);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<double>(instance.S[i]);
    const auto p = static_cast<Eigen::Index>(3 + i);
    inter(0, p) = k;
    inter(p, 1) = k;
    inter(p, 2) = k;
  }
  inter(1, 0) = static_cast<double>(instance.K() - instance.theta);
  inter(2, 0) = static_cast<double>(instance.theta);
  return LiabilityNetwork::from_blocks(inter, Vector::Zero(banks));
}

ConstraintSpec subset_sum_spec(const SubsetSumInstance& instance, SubsetSumModel model) {
  return ConstraintSpec{subset_sum_network(instance, model),
                        model == SubsetSumModel::kRerouting ? CompressionKind::kRerouting
                                                            : CompressionKind::kConservative,
                        false};
}

SubsetSumAnswer subset_sum_oracle(const SubsetSumInstance& instance) {
  instance.validate();
  const std::size_t n = instance.S.size();
  if (n > 24) throw ValidationError("subset-sum enumeration is limited to 24 integers");
  SubsetSumAnswer ans;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    long long sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) sum += instance.S[i];
    }
    if (sum == instance.theta) {
      ans.solvable = true;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) ans.witness.push_back(i);
      }
      return ans;
    }
  }
  return ans;
}

SubsetSumInstance random_subset_sum_instance(std::mt19937_64& rng, std::size_t n, long long max_value) {
  if (n == 0 || max_value < 1) throw ValidationError("need n >= 1 and max_value >= 1");
  std::uniform_int_distribution<long long> value(1, max_value);
  SubsetSumInstance inst;
  do {
    inst.S.clear();
    for (std::size_t i = 0; i < n; ++i) inst.S.push_back(value(rng));
  } while (inst.K() < 2);
  std::uniform_int_distribution<long long> target(1, inst.K() - 1);
  inst.theta = target(rng);
  return inst;
}

}  // namespace netcomp
