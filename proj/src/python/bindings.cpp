#include "netcomp/casestudies.hpp"
#include "netcomp/clearing.hpp"
#include "netcomp/compression.hpp"
#include "netcomp/errors.hpp"
#include "netcomp/network.hpp"
#include "netcomp/objectives.hpp"
#include "netcomp/optimizer.hpp"
#include "netcomp/risk.hpp"
#include "netcomp/thresholds.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace netcomp;

namespace {

std::vector<bool> to_defaults(const DefaultSet& z) { return {z.begin(), z.end()}; }

}  // namespace

PYBIND11_MODULE(_netcomp, m) {
  m.doc() = "Collateralized clearing, systematic-shock risk and portfolio compression";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<ValidationError>(m, "ValidationError", error.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", error.ptr());
  py::register_exception<SingularSystemError>(m, "SingularSystemError", error.ptr());

  // Networks
  py::class_<LiabilityNetwork>(m, "LiabilityNetwork")
      .def(py::init<Matrix>(), py::arg("liabilities"),
           "n x (n+1) matrix; column 0 is society, column j+1 is bank j")
      .def_static("from_blocks", &LiabilityNetwork::from_blocks, py::arg("interbank"), py::arg("societal"))
      .def_property_readonly("size", &LiabilityNetwork::size)
      .def_property_readonly("matrix", &LiabilityNetwork::matrix)
      .def_property_readonly("interbank_block", &LiabilityNetwork::interbank_block)
      .def_property_readonly("societal_column", &LiabilityNetwork::societal_column)
      .def("total_obligations", &LiabilityNetwork::total_obligations)
      .def("to_csv", &network_to_csv)
      .def("to_json", &network_to_json)
      .def("__eq__", &LiabilityNetwork::operator==)
      .def("__repr__", [](const LiabilityNetwork& n) { return "LiabilityNetwork(n=" + std::to_string(n.size()) + ")"; });

  py::class_<ThreeBankParams>(m, "ThreeBankParams")
      .def(py::init<>())
      .def(py::init([](std::array<double, 3> x, double y, double lambda, double xi) {
             ThreeBankParams p{x, y, lambda, xi};
             p.validate();
             return p;
           }),
           py::arg("x") = std::array<double, 3>{1.0, 2.0, 3.0}, py::arg("y") = 1.0, py::arg("lam") = 0.5,
           py::arg("xi") = 0.5)
      .def_readwrite("x", &ThreeBankParams::x)
      .def_readwrite("y", &ThreeBankParams::y)
      .def_readwrite("lam", &ThreeBankParams::lambda)
      .def_readwrite("xi", &ThreeBankParams::xi);

  m.def("net_positions", &net_positions);
  m.def("complete_regular_network", &complete_regular_network, py::arg("n"), py::arg("y"));
  m.def("ring_network", &ring_network, py::arg("cycle"), py::arg("y"));
  m.def("fully_compressed_network", &fully_compressed_network, py::arg("n"), py::arg("y"));
  m.def("three_bank_network", &three_bank_network);
  m.def("parse_network_csv", &parse_network_csv);
  m.def("parse_network_json", &parse_network_json);
  m.def("load_network", [](const std::filesystem::path& p) { return load_network(p); });
  m.def("save_network", [](const LiabilityNetwork& n, const std::filesystem::path& p) { save_network(n, p); });

  // Clearing
  py::class_<ClearingParams>(m, "ClearingParams")
      .def(py::init([](double mu, double alpha_x, double alpha_L) {
             ClearingParams p{mu, alpha_x, alpha_L};
             p.validate();
             return p;
           }),
           py::arg("mu") = 0.0, py::arg("alpha_x") = 1.0, py::arg("alpha_L") = 1.0)
      .def_readwrite("mu", &ClearingParams::mu)
      .def_readwrite("alpha_x", &ClearingParams::alpha_x)
      .def_readwrite("alpha_L", &ClearingParams::alpha_L);

  py::class_<ClearingResult>(m, "ClearingResult")
      .def_readonly("payments", &ClearingResult::payments)
      .def_readonly("wealths", &ClearingResult::wealths)
      .def_property_readonly("defaults", [](const ClearingResult& r) { return to_defaults(r.defaults); })
      .def_readonly("iterations", &ClearingResult::iterations);

  m.def(
      "clearing_payments",
      [](const Vector& x, const LiabilityNetwork& net, const ClearingParams& p) { return clearing_payments(x, net, p); },
      py::arg("endowments"), py::arg("network"), py::arg("params") = ClearingParams{});
  m.def(
      "fictitious_default_payments", &fictitious_default_payments, py::arg("endowments"), py::arg("network"),
      py::arg("params") = ClearingParams{});

  // Shocks and thresholds
  py::class_<ShockModel>(m, "ShockModel")
      .def(py::init([](Vector b, Vector s, double r, double sigma, double T) {
             ShockModel sh{std::move(b), std::move(s), r, sigma, T};
             sh.validate();
             return sh;
           }),
           py::arg("riskless"), py::arg("risky"), py::arg("rate") = 0.0, py::arg("volatility") = 0.2,
           py::arg("horizon") = 1.0)
      .def_readwrite("riskless", &ShockModel::riskless)
      .def_readwrite("risky", &ShockModel::risky)
      .def_readwrite("rate", &ShockModel::rate)
      .def_readwrite("volatility", &ShockModel::volatility)
      .def_readwrite("horizon", &ShockModel::horizon)
      .def("exposure", &ShockModel::exposure);

  py::enum_<ThresholdMethod>(m, "ThresholdMethod")
      .value("BISECTION", ThresholdMethod::kBisection)
      .value("REGIME_WALK", ThresholdMethod::kRegimeWalk)
      .value("AUTO", ThresholdMethod::kAuto);

  py::class_<ThresholdProfile>(m, "ThresholdProfile")
      .def_readonly("qstar", &ThresholdProfile::qstar)
      .def_readonly("order", &ThresholdProfile::order)
      .def_property_readonly("default_sets",
                             [](const ThresholdProfile& p) {
                               std::vector<std::vector<bool>> out;
                               for (const auto& z : p.default_sets) out.push_back(to_defaults(z));
                               return out;
                             })
      .def_readonly("intercepts", &ThresholdProfile::intercepts)
      .def_readonly("slopes", &ThresholdProfile::slopes)
      .def("boundary", &ThresholdProfile::boundary)
      .def("regime_of", &ThresholdProfile::regime_of)
      .def("regime_wealths", &ThresholdProfile::regime_wealths);

  m.def(
      "solvency_thresholds",
      [](const LiabilityNetwork& n, const ShockModel& s, const ClearingParams& p) { return solvency_thresholds(n, s, p); },
      py::arg("network"), py::arg("shock"), py::arg("params") = ClearingParams{});
  m.def("threshold_profile", &threshold_profile, py::arg("network"), py::arg("shock"),
        py::arg("params") = ClearingParams{}, py::arg("method") = ThresholdMethod::kAuto);

  // Risk
  py::enum_<AggregationKind>(m, "Aggregation")
      .value("SOLVENT_COUNT", AggregationKind::kSolventCount)
      .value("SYSTEM_WEALTH", AggregationKind::kSystemWealth)
      .value("EXTERNAL_WEALTH", AggregationKind::kExternalWealth);
  py::enum_<MeasureKind>(m, "Measure")
      .value("VAR", MeasureKind::kValueAtRisk)
      .value("ES", MeasureKind::kExpectedShortfall)
      .value("WORST_CASE", MeasureKind::kWorstCase)
      .value("EXPECTATION", MeasureKind::kExpectation);
  py::class_<RiskMeasure>(m, "RiskMeasure")
      .def(py::init([](MeasureKind k, double g) {
             RiskMeasure r{k, g};
             r.validate();
             return r;
           }),
           py::arg("kind") = MeasureKind::kExpectedShortfall, py::arg("gamma") = 0.0)
      .def_readwrite("kind", &RiskMeasure::kind)
      .def_readwrite("gamma", &RiskMeasure::gamma);

  m.def("aggregate", &aggregate, py::arg("wealths"), py::arg("network"), py::arg("kind"));
  m.def("regime_masses", &regime_masses, py::arg("profile"), py::arg("shock"), py::arg("gamma"));
  m.def("var_systematic", &var_systematic, py::arg("network"), py::arg("shock"), py::arg("params"), py::arg("kind"),
        py::arg("gamma"));
  m.def("es_systematic", &es_systematic, py::arg("network"), py::arg("shock"), py::arg("params"), py::arg("kind"),
        py::arg("gamma"));
  m.def("systematic_risk", &systematic_risk, py::arg("network"), py::arg("shock"), py::arg("params"),
        py::arg("kind"), py::arg("measure"));

  py::class_<MonteCarloEstimate>(m, "MonteCarloEstimate")
      .def_readonly("estimate", &MonteCarloEstimate::estimate)
      .def_readonly("standard_error", &MonteCarloEstimate::standard_error)
      .def_readonly("samples", &MonteCarloEstimate::samples)
      .def_readonly("tail", &MonteCarloEstimate::tail);
  m.def(
      "es_monte_carlo",
      [](const LiabilityNetwork& net, const ShockModel& sh, const ClearingParams& p, AggregationKind k, double g,
         std::size_t n, std::uint64_t seed, unsigned threads) {
        MonteCarloOptions opt;
        opt.threads = threads;
        py::gil_scoped_release release;
        return es_monte_carlo(net, lognormal_sampler(sh), p, k, g, n, seed, opt);
      },
      py::arg("network"), py::arg("shock"), py::arg("params"), py::arg("kind"), py::arg("gamma"),
      py::arg("samples"), py::arg("seed"), py::arg("threads") = 1u);

  // Compression
  py::enum_<CompressionKind>(m, "CompressionKind")
      .value("BILATERAL", CompressionKind::kBilateral)
      .value("CONSERVATIVE", CompressionKind::kConservative)
      .value("REROUTING", CompressionKind::kRerouting)
      .value("NONCONSERVATIVE", CompressionKind::kNonconservative);
  py::class_<ConstraintSpec>(m, "ConstraintSpec")
      .def(py::init([](LiabilityNetwork base, CompressionKind kind, bool fix) {
             return ConstraintSpec{std::move(base), kind, fix};
           }),
           py::arg("base"), py::arg("kind") = CompressionKind::kConservative, py::arg("fix_society") = false)
      .def_readonly("base", &ConstraintSpec::base)
      .def_readonly("kind", &ConstraintSpec::kind)
      .def_readonly("fix_society", &ConstraintSpec::fix_society);
  py::class_<FeasibilityReport>(m, "FeasibilityReport")
      .def_readonly("feasible", &FeasibilityReport::feasible)
      .def_readonly("max_violation", &FeasibilityReport::max_violation)
      .def_readonly("violations", &FeasibilityReport::violations)
      .def("__bool__", [](const FeasibilityReport& r) { return r.feasible; });

  m.def(
      "is_feasible",
      [](const Matrix& l, const ConstraintSpec& s, double tol) { return is_feasible(l, s, tol); },
      py::arg("liabilities"), py::arg("spec"), py::arg("tolerance") = kFeasibilityTolerance);
  m.def(
      "is_feasible",
      [](const LiabilityNetwork& n, const ConstraintSpec& s, double tol) { return is_feasible(n, s, tol); },
      py::arg("network"), py::arg("spec"), py::arg("tolerance") = kFeasibilityTolerance);
  m.def("maximal_compression", &maximal_compression);
  m.def("repair", &repair, py::arg("candidate"), py::arg("spec"));

  // Objectives and optimizers
  py::enum_<EntropyRange>(m, "EntropyRange")
      .value("INTERBANK", EntropyRange::kInterbank)
      .value("ALL", EntropyRange::kAll);
  py::enum_<StressField>(m, "StressField")
      .value("CONSTANT", StressField::kConstant)
      .value("COLLATERAL_REINVESTMENT", StressField::kCollateralReinvestment);
  m.def("gross_notional", &gross_notional);
  m.def("entropy", &entropy, py::arg("network"), py::arg("range") = EntropyRange::kInterbank);

  py::class_<SystemicRiskConfig>(m, "SystemicRiskConfig")
      .def(py::init([](AggregationKind agg, RiskMeasure measure, ShockModel shock, ClearingParams clearing,
                       StressField field) {
             SystemicRiskConfig c;
             c.aggregation = agg;
             c.measure = measure;
             c.shock = std::move(shock);
             c.clearing = clearing;
             c.field = field;
             return c;
           }),
           py::arg("aggregation"), py::arg("measure"), py::arg("shock"), py::arg("clearing") = ClearingParams{},
           py::arg("field") = StressField::kConstant);

  py::class_<Objective>(m, "Objective")
      .def_static("gross", &Objective::gross)
      .def_static("entropy", &Objective::entropy, py::arg("range") = EntropyRange::kInterbank)
      .def_static("systemic_risk", &Objective::systemic_risk, py::arg("config"))
      .def("evaluate", &Objective::evaluate, py::arg("network"), py::arg("base"))
      .def("describe", &Objective::describe);

  py::class_<GAConfig>(m, "GAConfig")
      .def(py::init<>())
      .def_readwrite("population_size", &GAConfig::population_size)
      .def_readwrite("elite_count", &GAConfig::elite_count)
      .def_readwrite("crossover_rate", &GAConfig::crossover_rate)
      .def_readwrite("mutation_rate", &GAConfig::mutation_rate)
      .def_readwrite("mutation_scale", &GAConfig::mutation_scale)
      .def_readwrite("mutation_fine_ratio", &GAConfig::mutation_fine_ratio)
      .def_readwrite("stall_generations", &GAConfig::stall_generations)
      .def_readwrite("max_generations", &GAConfig::max_generations)
      .def_readwrite("seed", &GAConfig::seed)
      .def_readwrite("threads", &GAConfig::threads)
      .def_readwrite("target_value", &GAConfig::target_value);
  py::class_<GAResult>(m, "GAResult")
      .def_readonly("best", &GAResult::best)
      .def_readonly("best_value", &GAResult::best_value)
      .def_readonly("history", &GAResult::history)
      .def_readonly("generations", &GAResult::generations)
      .def_readonly("evaluations", &GAResult::evaluations);
  m.def(
      "ga_optimize",
      [](const Objective& obj, const ConstraintSpec& spec, const GAConfig& cfg) {
        py::gil_scoped_release release;
        return ga_optimize(obj, spec, cfg);
      },
      py::arg("objective"), py::arg("spec"), py::arg("config") = GAConfig{});

  py::class_<LocalSearchResult>(m, "LocalSearchResult")
      .def_readonly("network", &LocalSearchResult::network)
      .def_readonly("value", &LocalSearchResult::value)
      .def_readonly("evaluations", &LocalSearchResult::evaluations);
  m.def(
      "local_search_baseline",
      [](const Objective& obj, const ConstraintSpec& spec, const LiabilityNetwork& start) {
        return local_search_baseline(obj, spec, start);
      },
      py::arg("objective"), py::arg("spec"), py::arg("start"));

  // Case studies
  py::enum_<SpecialNetwork>(m, "SpecialNetwork")
      .value("COMPLETELY_CONNECTED", SpecialNetwork::kCompletelyConnected)
      .value("RING_123", SpecialNetwork::kRing123)
      .value("RING_132", SpecialNetwork::kRing132)
      .value("COMPRESSED", SpecialNetwork::kCompressed);
  m.def("special_network_params", &special_network_params, py::arg("kind"), py::arg("y"));
  m.def("three_bank_shock", &three_bank_shock, py::arg("params"), py::arg("volatility") = 0.2);
  m.def("three_bank_thresholds", &three_bank_thresholds, py::arg("params"), py::arg("clearing"));
  m.def("default_y_grid", &default_y_grid);

  py::enum_<SubsetSumModel>(m, "SubsetSumModel")
      .value("REROUTING", SubsetSumModel::kRerouting)
      .value("CONSERVATIVE", SubsetSumModel::kConservative);
  py::class_<SubsetSumInstance>(m, "SubsetSumInstance")
      .def(py::init([](std::vector<long long> S, long long theta) {
             SubsetSumInstance inst{std::move(S), theta};
             inst.validate();
             return inst;
           }),
           py::arg("S"), py::arg("theta"))
      .def_readonly("S", &SubsetSumInstance::S)
      .def_readonly("theta", &SubsetSumInstance::theta);
  py::class_<SubsetSumAnswer>(m, "SubsetSumAnswer")
      .def_readonly("solvable", &SubsetSumAnswer::solvable)
      .def_readonly("witness", &SubsetSumAnswer::witness);
  m.def("subset_sum_network", &subset_sum_network, py::arg("instance"), py::arg("model"));
  m.def("subset_sum_spec", &subset_sum_spec, py::arg("instance"), py::arg("model"));
  m.def("subset_sum_oracle", &subset_sum_oracle);
}
