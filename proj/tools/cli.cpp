#include "cli.hpp"

#include "netcomp/casestudies.hpp"
#include "netcomp/clearing.hpp"
#include "netcomp/compression.hpp"
#include "netcomp/errors.hpp"
#include "netcomp/objectives.hpp"
#include "netcomp/optimizer.hpp"
#include "netcomp/risk.hpp"
#include "netcomp/thresholds.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace netcomp::cli {

namespace {

/// Flag values that parse but make no sense together.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Settings {
  // inputs / outputs
  std::string network;
  std::string format = "auto";
  std::string out_dir;
  std::string endow;
  std::vector<double> endow_values;
  unsigned threads = 1;
  std::uint64_t seed = 42;

  // clearing
  double mu = 0.0;
  std::vector<double> alpha{1.0, 1.0};

  // shock
  std::string exposures;
  std::vector<double> riskless;
  std::vector<double> risky;
  double rate = 0.0;
  double sigma = 0.2;
  double horizon = 1.0;
  std::string method = "auto";

  // risk
  std::string agg = "external";
  std::string measure = "es";
  double gamma = 0.8;
  std::size_t mc = 0;
  std::size_t batch = 16384;

  // compression
  std::string mode = "max";
  std::string constraint = "conservative";
  bool fix_society = false;
  std::string objective = "risk";
  std::string entropy_range = "interbank";
  std::string field = "constant";
  GAConfig ga;
  double target = -1e300;

  // case studies
  std::vector<double> y_grid;
  std::string table = "thresholds";
  std::string sheets;
  std::size_t synthetic = 20;
  std::uint64_t sheet_seed = 1;
  std::vector<double> mus{0.0, 0.2, 0.4};
  double sparsity = 0.3;
  std::uint64_t calibration_seed = 7;

  // generators
  std::vector<long long> set;
  long long theta = 0;
  std::string model = "rerouting";
  std::string kind = "complete";
  std::size_t n = 3;
  double y = 1.0;
  std::vector<std::size_t> cycle;
  double lambda = 0.5;
  double xi = 0.5;
  std::vector<double> x{1.0, 2.0, 3.0};
};

struct Artifact {
  std::string file;
  std::string content;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// Numbers separated by commas, whitespace or newlines; `#` comments and a
/// non-numeric header line are skipped.
Vector read_vector(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  std::vector<double> values;
  bool first = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    const auto fields = split_fields(line);
    if (first && !fields.empty() && !is_number(fields[0])) {
      first = false;
      continue;
    }
    first = false;
    for (const auto& f : fields) {
      if (!is_number(f)) throw ParseError(path + ":" + std::to_string(line_no) + ": malformed number '" + f + "'");
      values.push_back(std::stod(f));
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

/// CSV with a header naming columns `b`/`riskless` and `s`/`risky`.
std::pair<Vector, Vector> read_exposures(const std::string& path) {
  std::istringstream in(read_file(path));
  std::string line;
  int col_b = -1, col_s = -1;
  std::vector<double> b, s;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    const auto fields = split_fields(line);
    if (!header) {
      header = true;
      for (std::size_t k = 0; k < fields.size(); ++k) {
        if (fields[k] == "b" || fields[k] == "riskless") col_b = static_cast<int>(k);
        if (fields[k] == "s" || fields[k] == "risky") col_s = static_cast<int>(k);
      }
      if (col_b < 0 || col_s < 0) throw ParseError(path + ": header must name columns b and s");
      continue;
    }
    const auto need = static_cast<std::size_t>(std::max(col_b, col_s));
    if (fields.size() <= need || !is_number(fields[static_cast<std::size_t>(col_b)]) ||
        !is_number(fields[static_cast<std::size_t>(col_s)])) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": malformed exposure row");
    }
    b.push_back(std::stod(fields[static_cast<std::size_t>(col_b)]));
    s.push_back(std::stod(fields[static_cast<std::size_t>(col_s)]));
  }
  const auto to_vec = [](const std::vector<double>& v) {
    return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  return {to_vec(b), to_vec(s)};
}

LiabilityNetwork load(const Settings& st) {
  if (st.network.empty()) throw UsageError("--network is required");
  return load_network(st.network, parse_network_format(st.format));
}

ClearingParams clearing(const Settings& st) {
  if (st.alpha.size() != 2) throw UsageError("--alpha takes two values: alpha_x alpha_L");
  ClearingParams cp{st.mu, st.alpha[0], st.alpha[1]};
  try {
    cp.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return cp;
}

ShockModel shock(const Settings& st, std::size_t n) {
  ShockModel sh;
  if (!st.exposures.empty()) {
    std::tie(sh.riskless, sh.risky) = read_exposures(st.exposures);
  } else {
    if (st.risky.empty()) throw UsageError("shock exposures missing: give --exposures or --risky (and --riskless)");
    sh.risky = Eigen::Map<const Vector>(st.risky.data(), static_cast<Eigen::Index>(st.risky.size()));
    sh.riskless = st.riskless.empty()
                      ? Vector(Vector::Zero(sh.risky.size()))
                      : Vector(Eigen::Map<const Vector>(st.riskless.data(), static_cast<Eigen::Index>(st.riskless.size())));
  }
  if (static_cast<std::size_t>(sh.risky.size()) != n || static_cast<std::size_t>(sh.riskless.size()) != n) {
    throw UsageError("exposures must have one entry per bank (" + std::to_string(n) + ")");
  }
  sh.rate = st.rate;
  sh.volatility = st.sigma;
  sh.horizon = st.horizon;
  try {
    sh.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  return sh;
}

template <typename F>
auto usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
}

GAConfig ga_config(const Settings& st) {
  GAConfig g = st.ga;
  g.seed = st.seed;
  g.threads = st.threads;
  g.target_value = st.target;
  usage([&] {
    g.validate();
    return 0;
  });
  return g;
}
// ---------------------------------------------------------------------------
// Subcommands

std::vector<Artifact> cmd_clear(const Settings& st) {
  const LiabilityNetwork net = load(st);
  const ClearingParams cp = clearing(st);
  Vector x;
  if (!st.endow.empty()) {
    x = read_vector(st.endow);
  } else if (!st.endow_values.empty()) {
    x = Eigen::Map<const Vector>(st.endow_values.data(), static_cast<Eigen::Index>(st.endow_values.size()));
  } else {
    throw UsageError("endowments missing: give --endow file or --endow-values list");
  }
  if (static_cast<std::size_t>(x.size()) != net.size()) {
    throw UsageError("endowment vector has " + std::to_string(x.size()) + " entries, network has " +
                     std::to_string(net.size()) + " banks");
  }
  const ClearingResult res = clearing_payments(x, net, cp);
  std::ostringstream out;
  out << "bank,payment,wealth,default\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out << i + 1 << "," << format_double(res.payments(k)) << "," << format_double(res.wealths(k)) << ","
        << (res.defaults[i] ? 1 : 0) << "\n";
  }
  return {{"clearing.csv", out.str()}};
}

ThresholdMethod parse_method(const std::string& m) {
  if (m == "auto") return ThresholdMethod::kAuto;
  if (m == "bisection") return ThresholdMethod::kBisection;
  if (m == "regime-walk" || m == "walk") return ThresholdMethod::kRegimeWalk;
  throw UsageError("unknown threshold method '" + m + "' (auto, bisection, regime-walk)");
}

std::vector<Artifact> cmd_thresholds(const Settings& st) {
  const LiabilityNetwork net = load(st);
  const ClearingParams cp = clearing(st);
  const ShockModel sh = shock(st, net.size());
  const ThresholdProfile prof = threshold_profile(net, sh, cp, parse_method(st.method));
  std::ostringstream out;
  out << "rank,bank,qstar,regime_lower,regime_upper,defaults\n";
  for (std::size_t k = 0; k <= prof.size(); ++k) {
    out << k << ",";
    if (k == 0) {
      out << ",inf,";
    } else {
      out << prof.order[k - 1] + 1 << "," << format_double(prof.boundary(k)) << ",";
    }
    out << format_double(prof.boundary(k + 1)) << "," << format_double(prof.boundary(k)) << ","
        << default_count(prof.default_sets[k]) << "\n";
  }
  return {{"thresholds.csv", out.str()}};
}

std::vector<Artifact> cmd_risk(const Settings& st) {
  const LiabilityNetwork net = load(st);
  const ClearingParams cp = clearing(st);
  const ShockModel sh = shock(st, net.size());
  const AggregationKind agg = usage([&] { return parse_aggregation(st.agg); });
  const MeasureKind kind = usage([&] { return parse_measure(st.measure); });
  RiskMeasure rm{kind, st.gamma};
  usage([&] {
    rm.validate();
    return 0;
  });
  std::ostringstream out;
  out << "aggregation,measure,gamma,value,standard_error,samples,method\n";
  out << to_string(agg) << "," << to_string(kind) << "," << format_double(st.gamma) << ",";
  if (st.mc > 0) {
    double gamma = st.gamma;
    if (kind == MeasureKind::kExpectation) gamma = 0.0;
    if (kind != MeasureKind::kExpectedShortfall && kind != MeasureKind::kExpectation) {
      throw UsageError("--mc supports the es and expectation measures only");
    }
    MonteCarloOptions mo;
    mo.batch_size = st.batch;
    mo.threads = st.threads;
    const MonteCarloEstimate est = usage([&] {
      return es_monte_carlo(net, lognormal_sampler(sh), cp, agg, gamma, st.mc, st.seed, mo);
    });
    out << format_double(est.estimate) << "," << format_double(est.standard_error) << "," << est.samples
        << ",monte-carlo\n";
  } else {
    out << format_double(systematic_risk(net, sh, cp, agg, rm)) << ",0,0,closed-form\n";
  }
  return {{"risk.csv", out.str()}};
}

Objective make_objective(const Settings& st, const LiabilityNetwork& net) {
  if (st.objective == "gross") return Objective::gross();
  if (st.objective == "entropy") {
    if (st.entropy_range == "interbank") return Objective::entropy(EntropyRange::kInterbank);
    if (st.entropy_range == "all") return Objective::entropy(EntropyRange::kAll);
    throw UsageError("unknown entropy range '" + st.entropy_range + "' (interbank, all)");
  }
  if (st.objective != "risk") throw UsageError("unknown objective '" + st.objective + "' (risk, gross, entropy)");
  SystemicRiskConfig cfg;
  cfg.aggregation = usage([&] { return parse_aggregation(st.agg); });
  cfg.measure = RiskMeasure{usage([&] { return parse_measure(st.measure); }), st.gamma};
  cfg.shock = shock(st, net.size());
  cfg.clearing = clearing(st);
  if (st.field == "constant") {
    cfg.field = StressField::kConstant;
  } else if (st.field == "reinvest") {
    cfg.field = StressField::kCollateralReinvestment;
  } else {
    throw UsageError("unknown stress field '" + st.field + "' (constant, reinvest)");
  }
  return usage([&] { return Objective::systemic_risk(cfg); });
}

std::vector<Artifact> cmd_compress(const Settings& st) {
  const LiabilityNetwork net = load(st);
  const ConstraintSpec spec{net, usage([&] { return parse_compression_kind(st.constraint); }), st.fix_society};
  if (!is_feasible(net, spec).feasible) throw UsageError("base network violates its own constraint set");
  if (st.mode == "max") {
    const LiabilityNetwork out = maximal_compression(spec);
    std::ostringstream summary;
    summary << "network,gross_notional\n"
            << "original," << format_double(gross_notional(net)) << "\n"
            << "maximal," << format_double(gross_notional(out)) << "\n";
    return {{"network.csv", network_to_csv(out)}, {"summary.csv", summary.str()}};
  }
  if (st.mode != "opt") throw UsageError("unknown mode '" + st.mode + "' (max, opt)");
  const Objective obj = make_objective(st, net);
  const GAResult res = ga_optimize(obj, spec, ga_config(st));
  std::ostringstream history;
  history << "generation,best\n";
  for (std::size_t g = 0; g < res.history.size(); ++g) history << g + 1 << "," << format_double(res.history[g]) << "\n";
  std::ostringstream summary;
  summary << "network,objective\n"
          << "original," << format_double(obj.evaluate(net, net)) << "\n"
          << "maximal," << format_double(obj.evaluate(maximal_compression(spec), net)) << "\n"
          << "optimal," << format_double(res.best_value) << "\n"
          << "# generations = " << res.generations << "\n"
          << "# evaluations = " << res.evaluations << "\n"
          << "# repair_failures = " << res.repair_failures << "\n";
  return {{"network.csv", network_to_csv(res.best)}, {"history.csv", history.str()}, {"summary.csv", summary.str()}};
}

std::vector<Artifact> cmd_three_bank(const Settings& st) {
  const ClearingParams cp = clearing(st);
  if (cp.mu != 0.0) throw UsageError("the three-bank case study is uncollateralized (--mu 0)");
  const std::vector<double> grid = st.y_grid.empty() ? default_y_grid() : st.y_grid;
  for (double y : grid) {
    if (!(y >= 0.0)) throw UsageError("--y-grid values must be nonnegative");
  }
  if (st.table == "thresholds") {
    return {{"three_bank_thresholds.csv", robust_fragility_report(grid, cp).to_csv()}};
  }
  if (st.table != "risk") throw UsageError("unknown table '" + st.table + "' (thresholds, risk)");
  const std::vector<AggregationKind> aggs{AggregationKind::kExternalWealth, AggregationKind::kSystemWealth,
                                          AggregationKind::kSolventCount};
  std::ostringstream out;
  out << "y,network,aggregation,expectation\n";
  for (double y : grid) {
    for (auto kind : kSpecialNetworks) {
      const ThreeBankParams p = special_network_params(kind, y);
      const LiabilityNetwork net = three_bank_network(p);
      const ShockModel sh = three_bank_shock(p, st.sigma);
      const ThresholdProfile prof = threshold_profile(net, sh, cp);
      for (auto agg : aggs) {
        out << format_double(y) << "," << to_string(kind) << "," << to_string(agg) << ","
            << format_double(systematic_risk_from_profile(prof, net, sh, agg, {MeasureKind::kExpectation, 0.0}))
            << "\n";
      }
    }
  }
  return {{"three_bank_risk.csv", out.str()}};
}

std::vector<Artifact> cmd_eba(const Settings& st) {
  const std::vector<EbaBalanceSheet> sheets =
      st.sheets.empty() ? usage([&] { return synthetic_eba_sheets(st.synthetic, st.sheet_seed); })
                        : load_eba_sheets(st.sheets);
  EbaTableOptions o;
  o.mus = st.mus;
  o.aggregation = usage([&] { return parse_aggregation(st.agg); });
  o.gamma = st.gamma;
  if (st.alpha.size() != 2) throw UsageError("--alpha takes two values: alpha_x alpha_L");
  o.alpha_x = st.alpha[0];
  o.alpha_L = st.alpha[1];
  o.calibration.sparsity = st.sparsity;
  o.calibration.seed = st.calibration_seed;
  o.calibration.volatility = st.sigma;
  o.ga = ga_config(st);
  return {{"eba_table.csv", eba_table_csv(eba_compression_table(sheets, o))},
          {"sheets.csv", eba_sheets_to_csv(sheets)}};
}

std::vector<Artifact> cmd_gen_subset_sum(const Settings& st) {
  SubsetSumInstance inst{st.set, st.theta};
  usage([&] {
    inst.validate();
    return 0;
  });
  const SubsetSumModel model = usage([&] { return parse_subset_sum_model(st.model); });
  std::string content = network_to_csv(subset_sum_network(inst, model));
  if (inst.S.size() <= 24) {
    const SubsetSumAnswer ans = subset_sum_oracle(inst);
    std::ostringstream note;
    note << "# solvable = " << (ans.solvable ? 1 : 0) << "\n# witness =";
    for (auto i : ans.witness) note << " " << inst.S[i];
    note << "\n";
    content = note.str() + content;
  }
  return {{"network.csv", content}};
}

std::vector<Artifact> cmd_gen_network(const Settings& st) {
  const LiabilityNetwork net = usage([&]() -> LiabilityNetwork {
    if (st.kind == "complete") return complete_regular_network(st.n, st.y);
    if (st.kind == "compressed") return fully_compressed_network(st.n, st.y);
    if (st.kind == "ring") {
      std::vector<std::size_t> cycle = st.cycle;
      if (cycle.empty()) {
        for (std::size_t i = 1; i <= st.n; ++i) cycle.push_back(i);
      }
      return ring_network(cycle, st.y);
    }
    if (st.kind == "three-bank") {
      if (st.x.size() != 3) throw ValidationError("--x takes three values");
      ThreeBankParams p;
      p.x = {st.x[0], st.x[1], st.x[2]};
      p.y = st.y;
      p.lambda = st.lambda;
      p.xi = st.xi;
      return three_bank_network(p);
    }
    throw ValidationError("unknown network kind '" + st.kind + "' (complete, ring, compressed, three-bank)");
  });
  return {{"network.csv", network_to_csv(net)}};
}

std::vector<Artifact> cmd_gen_sheets(const Settings& st) {
  return {{"sheets.csv", eba_sheets_to_csv(usage([&] { return synthetic_eba_sheets(st.n, st.seed); }))}};
}

// ---------------------------------------------------------------------------
// Option registration

void add_io(CLI::App* app, Settings& st, bool network = true) {
  if (network) {
    app->add_option("--network", st.network, "Network file (edge-list CSV or dense JSON)")->check(CLI::ExistingFile);
    app->add_option("--format", st.format, "Network format: auto, csv, json");
  }
  app->add_option("--out-dir", st.out_dir, "Write artifacts into this directory instead of stdout");
  app->add_option("--threads", st.threads, "Worker threads (0: all cores); results do not depend on it");
}

void add_clearing(CLI::App* app, Settings& st) {
  app->add_option("--mu", st.mu, "Collateral margin in [0,1]");
  app->add_option("--alpha", st.alpha, "Recovery rates alpha_x alpha_L")->expected(2);
}

void add_shock(CLI::App* app, Settings& st) {
  app->add_option("--exposures", st.exposures, "CSV with columns b and s, one row per bank")->check(CLI::ExistingFile);
  app->add_option("--riskless", st.riskless, "Riskless exposures b (comma list)")->delimiter(',');
  app->add_option("--risky", st.risky, "Risky exposures s (comma list)")->delimiter(',');
  app->add_option("--rate", st.rate, "Risk-free rate r");
  app->add_option("--sigma", st.sigma, "Volatility of the systematic factor");
  app->add_option("--horizon", st.horizon, "Horizon T");
}

void add_measure(CLI::App* app, Settings& st) {
  app->add_option("--agg", st.agg, "Aggregation: solvent, system, external");
  app->add_option("--measure", st.measure, "Risk measure: var, es, worst, expectation");
  app->add_option("--gamma", st.gamma, "Risk level gamma");
}

void add_ga(CLI::App* app, Settings& st) {
  app->add_option("--seed", st.seed, "Random seed");
  app->add_option("--population", st.ga.population_size, "GA population size");
  app->add_option("--elite", st.ga.elite_count, "GA elite count");
  app->add_option("--crossover", st.ga.crossover_rate, "GA crossover probability");
  app->add_option("--mutation", st.ga.mutation_rate, "GA mutation probability");
  app->add_option("--mutation-scale", st.ga.mutation_scale, "GA log-normal mutation spread");
  app->add_option("--mutation-fine-ratio", st.ga.mutation_fine_ratio, "GA smallest mutation spread relative to --mutation-scale");
  app->add_option("--vertex-rate", st.ga.vertex_mutation_rate, "GA random-vertex mutation probability");
  app->add_option("--tournament", st.ga.tournament_size, "GA tournament size");
  app->add_option("--stall", st.ga.stall_generations, "Stop after this many generations without improvement");
  app->add_option("--generations", st.ga.max_generations, "Maximum number of generations");
  app->add_option("--repair-retries", st.ga.repair_retries, "Projection retries per child");
  app->add_option("--target", st.target, "Stop once the objective reaches this value");
}

std::string header(const CLI::App* app, const std::string& command) {
  std::ostringstream out;
  out << "# netcomp " << command << "\n";
  std::vector<const CLI::App*> chain;
  for (const CLI::App* a = app; a != nullptr; a = a->get_parent()) chain.insert(chain.begin(), a);
  for (const CLI::App* a : chain) {
    for (const CLI::Option* opt : a->get_options()) {
      const std::string name = opt->get_single_name();
      if (name.empty() || name == "help" || opt->get_lnames().empty()) continue;
      std::string value;
      if (opt->count() > 0) {
        for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
      } else {
        value = opt->get_default_str();
      }
      if (opt->get_type_size() == 0 && opt->count() > 0) value = "true";
      out << "# --" << name << " = " << value << "\n";
    }
  }
  return out.str();
}

/// Appends `--key value` pairs from a JSON config object for keys not given
/// on the command line. Nested objects are flattened.
void apply_config(std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return;
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  if (!cfg.is_object()) throw UsageError("config " + path + " must hold a JSON object");
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos
                                                                                          : a.find('=') - 2));
  }
  const auto scalar = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  };
  std::function<void(const nlohmann::json&)> walk = [&](const nlohmann::json& obj) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const std::string key = it.key();
      const auto& v = it.value();
      if (v.is_object()) {
        walk(v);
        continue;
      }
      if (key == "config" || given.count(key)) continue;
      if (v.is_boolean()) {
        if (v.get<bool>()) args.push_back("--" + key);
        continue;
      }
      args.push_back("--" + key);
      if (v.is_array()) {
        for (const auto& e : v) args.push_back(scalar(e));
      } else {
        args.push_back(scalar(v));
      }
    }
  };
  walk(cfg);
}

void emit(const std::vector<Artifact>& artifacts, const std::string& head, const Settings& st, std::ostream& out) {
  if (st.out_dir.empty()) {
    out << head << artifacts.front().content;
    return;
  }
  std::filesystem::create_directories(st.out_dir);
  for (const auto& a : artifacts) {
    const auto path = std::filesystem::path(st.out_dir) / a.file;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << head << a.content;
  }
  out << "wrote";
  for (const auto& a : artifacts) out << " " << (std::filesystem::path(st.out_dir) / a.file).string();
  out << "\n";
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Settings st;
  std::string config_path;
  CLI::App app{"Clearing, systemic risk and compression of financial obligation networks", "netcomp"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.add_option("--config", config_path, "JSON file supplying any flag; the command line overrides it");

  using Handler = std::function<std::vector<Artifact>(const Settings&)>;
  std::vector<std::pair<CLI::App*, Handler>> commands;

  auto* clear = app.add_subcommand("clear", "Greatest clearing vector, wealths and defaults");
  add_io(clear, st);
  add_clearing(clear, st);
  clear->add_option("--endow", st.endow, "File with one endowment per bank")->check(CLI::ExistingFile);
  clear->add_option("--endow-values", st.endow_values, "Endowments as a comma list")->delimiter(',');
  commands.emplace_back(clear, cmd_clear);

  auto* thr = app.add_subcommand("thresholds", "Solvency thresholds q*, default order and regimes");
  add_io(thr, st);
  add_clearing(thr, st);
  add_shock(thr, st);
  thr->add_option("--method", st.method, "auto, bisection, regime-walk");
  commands.emplace_back(thr, cmd_thresholds);

  auto* risk = app.add_subcommand("risk", "Systemic risk under the systematic lognormal shock");
  add_io(risk, st);
  add_clearing(risk, st);
  add_shock(risk, st);
  add_measure(risk, st);
  risk->add_option("--mc", st.mc, "Monte Carlo sample count (0: closed form)");
  risk->add_option("--seed", st.seed, "Monte Carlo seed");
  risk->add_option("--batch", st.batch, "Monte Carlo batch size");
  commands.emplace_back(risk, cmd_risk);

  auto* comp = app.add_subcommand("compress", "Maximal (LP) or optimal (GA) compression");
  add_io(comp, st);
  add_clearing(comp, st);
  add_shock(comp, st);
  add_measure(comp, st);
  add_ga(comp, st);
  comp->add_option("--mode", st.mode, "max or opt");
  comp->add_option("--constraint", st.constraint, "bilateral, conservative, rerouting, nonconservative");
  comp->add_flag("--fix-society", st.fix_society, "Keep obligations to society fixed");
  comp->add_option("--objective", st.objective, "risk, gross, entropy");
  comp->add_option("--entropy-range", st.entropy_range, "interbank or all");
  comp->add_option("--field", st.field, "Stress field: constant or reinvest");
  commands.emplace_back(comp, cmd_compress);

  auto* cs = app.add_subcommand("casestudy", "Case-study tables");
  cs->require_subcommand(1);
  auto* tb = cs->add_subcommand("three-bank", "Three-bank thresholds or expected-risk table");
  add_io(tb, st, false);
  tb->add_option("--alpha", st.alpha, "Recovery rates alpha_x alpha_L")->expected(2)->default_str("0.5 0.5");
  tb->add_option("--mu", st.mu, "Collateral margin (must be 0)");
  tb->add_option("--y-grid", st.y_grid, "Societal obligations y (comma list; default 0.1..3.0)")->delimiter(',');
  tb->add_option("--table", st.table, "thresholds or risk");
  tb->add_option("--sigma", st.sigma, "Volatility for the risk table");
  commands.emplace_back(tb, cmd_three_bank);

  auto* eba = cs->add_subcommand("eba", "Original vs maximal vs optimal compression table");
  add_io(eba, st, false);
  add_ga(eba, st);
  eba->add_option("--sheets", st.sheets, "Balance-sheet CSV (name,total_assets,capital,interbank_liabilities)")
      ->check(CLI::ExistingFile);
  eba->add_option("--synthetic", st.synthetic, "Bank count of the synthetic sheet when --sheets is absent");
  eba->add_option("--sheet-seed", st.sheet_seed, "Seed of the synthetic sheet");
  eba->add_option("--mu", st.mus, "Collateral levels (comma list)")->delimiter(',');
  eba->add_option("--agg", st.agg, "Aggregation: solvent, system, external");
  eba->add_option("--gamma", st.gamma, "Expected-shortfall level");
  eba->add_option("--alpha", st.alpha, "Recovery rates alpha_x alpha_L")->expected(2);
  eba->add_option("--sparsity", st.sparsity, "Target interbank edge density");
  eba->add_option("--calibration-seed", st.calibration_seed, "Seed of the sparsity pattern");
  eba->add_option("--sigma", st.sigma, "Volatility of the systematic factor");
  commands.emplace_back(eba, cmd_eba);

  auto* gen = app.add_subcommand("gen", "Generate networks and input tables");
  gen->require_subcommand(1);
  auto* ss = gen->add_subcommand("subset-sum", "Subset-sum reduction network");
  add_io(ss, st, false);
  ss->add_option("--set", st.set, "Positive integers (comma list)")->delimiter(',')->required();
  ss->add_option("--theta", st.theta, "Target sum")->required();
  ss->add_option("--model", st.model, "rerouting or conservative");
  commands.emplace_back(ss, cmd_gen_subset_sum);

  auto* gn = gen->add_subcommand("network", "Complete, ring, compressed or three-bank network");
  add_io(gn, st, false);
  gn->add_option("--kind", st.kind, "complete, ring, compressed, three-bank");
  gn->add_option("--n", st.n, "Bank count");
  gn->add_option("--y", st.y, "Obligation of every bank to society");
  gn->add_option("--cycle", st.cycle, "Ring visiting order, 1-based (comma list)")->delimiter(',');
  gn->add_option("--lambda", st.lambda, "Three-bank weight of cycle 1-2-3");
  gn->add_option("--xi", st.xi, "Three-bank weight of cycle 1-3-2");
  gn->add_option("--x", st.x, "Three-bank endowment multipliers (comma list)")->delimiter(',');
  commands.emplace_back(gn, cmd_gen_network);

  auto* gs = gen->add_subcommand("eba-sheets", "Synthetic EBA-style balance sheets");
  add_io(gs, st, false);
  gs->add_option("--n", st.n, "Bank count");
  gs->add_option("--seed", st.seed, "Random seed");
  commands.emplace_back(gs, cmd_gen_sheets);

  bool three_bank_alpha_default = true;
  try {
    std::vector<std::string> args = raw_args;
    apply_config(args);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    three_bank_alpha_default = tb->count("--alpha") == 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  for (auto& [sub, handler] : commands) {
    if (!sub->parsed()) continue;
    if (sub == tb && three_bank_alpha_default) st.alpha = {0.5, 0.5};
    std::string name = sub->get_name();
    for (const CLI::App* p = sub->get_parent(); p != nullptr && p->get_parent() != nullptr; p = p->get_parent()) {
      name = p->get_name() + " " + name;
    }
    try {
      const std::vector<Artifact> artifacts = handler(st);
      emit(artifacts, header(sub, name), st, out);
      return 0;
    } catch (const UsageError& e) {
      err << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err << "error (" << name << "): " << e.what() << "\n";
      return 1;
    }
  }
  err << "no subcommand selected\n";
  return 2;
}

}  // namespace netcomp::cli
