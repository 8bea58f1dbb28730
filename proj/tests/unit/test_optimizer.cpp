#include "netcomp/casestudies.hpp"
#include "netcomp/errors.hpp"
#include "netcomp/optimizer.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace netcomp;

namespace {

GAConfig small_config(std::uint64_t seed = 11) {
  GAConfig cfg;
  cfg.population_size = 16;
  cfg.elite_count = 2;
  cfg.stall_generations = 15;
  cfg.max_generations = 80;
  cfg.seed = seed;
  return cfg;
}

SystemicRiskConfig three_bank_risk(const ThreeBankParams& p, AggregationKind agg) {
  SystemicRiskConfig cfg;
  cfg.aggregation = agg;
  cfg.measure = RiskMeasure{MeasureKind::kExpectation, 0.0};
  cfg.shock = three_bank_shock(p);
  cfg.clearing = ClearingParams{0.0, 0.5, 0.5};
  return cfg;
}

}  // namespace

TEST_CASE("GA configuration is validated") {
  GAConfig cfg;
  cfg.elite_count = cfg.population_size;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = GAConfig{};
  cfg.crossover_rate = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  cfg = GAConfig{};
  cfg.stall_generations = 0;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
  CHECK_NOTHROW(GAConfig{}.validate());
}

TEST_CASE("GA on gross notional reaches the maximal compression value") {
  std::mt19937_64 rng(1);
  for (auto kind : {CompressionKind::kConservative, CompressionKind::kNonconservative}) {
    const LiabilityNetwork base = testing::random_network(rng, 4);
    const ConstraintSpec spec{base, kind, false};
    const GAResult res = ga_optimize(Objective::gross(), spec, small_config());
    CHECK(res.best_value == doctest::Approx(gross_notional(maximal_compression(spec))).epsilon(1e-6));
    CHECK(is_feasible(res.best, spec).feasible);
  }
}

TEST_CASE("GA on a singleton set returns the base network") {
  // No opposing edges: bilateral compression cannot move anything.
  const LiabilityNetwork base = parse_network_csv("from,to,amount\n1,2,4\n2,3,1\n3,0,2\n");
  const ConstraintSpec spec{base, CompressionKind::kBilateral, false};
  const GAResult res = ga_optimize(Objective::entropy(), spec, small_config());
  CHECK((res.best.matrix() - base.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("GA history is nonincreasing and the best network is feasible") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 4; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, 4);
    const ConstraintSpec spec{base, CompressionKind::kRerouting, false};
    const GAResult res = ga_optimize(Objective::entropy(), spec, small_config(trial));
    REQUIRE(!res.history.empty());
    CHECK(res.history.size() == res.generations);
    for (std::size_t g = 1; g < res.history.size(); ++g) CHECK(res.history[g] <= res.history[g - 1]);
    CHECK(res.best_value == res.history.back());
    CHECK(is_feasible(res.best, spec).feasible);
    CHECK(res.best_value <= entropy(base) + 1e-12);
    CHECK(res.best_value == doctest::Approx(entropy(res.best)));
  }
}

TEST_CASE("GA results do not depend on the thread count") {
  std::mt19937_64 rng(3);
  const LiabilityNetwork base = testing::random_network(rng, 4);
  const ShockModel sh = testing::random_shock(rng, base);
  SystemicRiskConfig risk;
  risk.shock = sh;
  risk.clearing = ClearingParams{0.1, 0.5, 0.5};
  const ConstraintSpec spec{base, CompressionKind::kNonconservative, true};
  GAConfig a = small_config(5), b = small_config(5);
  a.threads = 1;
  b.threads = 3;
  const GAResult ra = ga_optimize(Objective::systemic_risk(risk), spec, a);
  const GAResult rb = ga_optimize(Objective::systemic_risk(risk), spec, b);
  CHECK(ra.history == rb.history);
  CHECK(ra.best == rb.best);
  CHECK(ra.evaluations == rb.evaluations);
}

TEST_CASE("GA stops at the target value") {
  std::mt19937_64 rng(4);
  const LiabilityNetwork base = testing::random_network(rng, 4);
  GAConfig cfg = small_config();
  cfg.target_value = 1e300;
  const GAResult res = ga_optimize(Objective::gross(), ConstraintSpec{base, CompressionKind::kRerouting, false}, cfg);
  CHECK(res.generations == 1);
}

TEST_CASE("local search on gross notional matches the LP optimum") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, 3);
    for (auto kind : {CompressionKind::kBilateral, CompressionKind::kConservative}) {
      const ConstraintSpec spec{base, kind, false};
      const LocalSearchResult res = local_search_baseline(Objective::gross(), spec, base);
      const double lp = gross_notional(maximal_compression(spec));
      CHECK(res.value == doctest::Approx(lp).epsilon(1e-4));
      CHECK(is_feasible(res.network, spec).feasible);
    }
  }
}

TEST_CASE("local search started at the optimum does not move") {
  std::mt19937_64 rng(6);
  const LiabilityNetwork base = testing::random_network(rng, 4);
  const ConstraintSpec spec{base, CompressionKind::kNonconservative, false};
  const LiabilityNetwork opt = maximal_compression(spec);
  const LocalSearchResult res = local_search_baseline(Objective::gross(), spec, opt);
  CHECK(res.network == opt);
  CHECK(res.value == gross_notional(opt));
}

TEST_CASE("local search rejects an infeasible start") {
  std::mt19937_64 rng(7);
  const LiabilityNetwork base = testing::random_network(rng, 3);
  const LiabilityNetwork other = testing::random_network(rng, 3);
  CHECK_THROWS_AS(
      local_search_baseline(Objective::gross(), ConstraintSpec{base, CompressionKind::kBilateral, false}, other),
      ValidationError);
}

TEST_CASE("three-bank rerouting: GA is not beaten by the heuristic networks") {
  for (double y : {0.5, 1.5}) {
    const ThreeBankParams cc = special_network_params(SpecialNetwork::kCompletelyConnected, y);
    const LiabilityNetwork base = three_bank_network(cc);
    const ConstraintSpec spec{base, CompressionKind::kRerouting, false};
    for (auto agg : {AggregationKind::kSystemWealth, AggregationKind::kExternalWealth}) {
      const Objective obj = Objective::systemic_risk(three_bank_risk(cc, agg));
      GAConfig cfg = small_config(9);
      cfg.population_size = 24;
      cfg.max_generations = 150;
      cfg.stall_generations = 30;
      const GAResult res = ga_optimize(obj, spec, cfg);
      for (auto kind : {SpecialNetwork::kCompletelyConnected, SpecialNetwork::kRing123, SpecialNetwork::kRing132}) {
        const LiabilityNetwork h = three_bank_network(special_network_params(kind, y));
        REQUIRE(is_feasible(h, spec).feasible);
        const double v = obj.evaluate(h, base);
        CHECK(res.best_value <= v + 1e-9 * (1.0 + std::abs(v)));
      }
    }
  }
}
