#include "netcomp/casestudies.hpp"
#include "netcomp/errors.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace netcomp;

namespace {

bool dp_subset_sum(const std::vector<long long>& S, long long theta) {
  std::vector<bool> reach(static_cast<std::size_t>(theta) + 1, false);
  reach[0] = true;
  for (long long k : S) {
    for (long long t = theta; t >= k; --t) {
      if (reach[static_cast<std::size_t>(t - k)]) reach[static_cast<std::size_t>(t)] = true;
    }
  }
  return reach[static_cast<std::size_t>(theta)];
}

// Thresholds of the special networks as displayed for x = (1, 2, 3).
std::array<double, 3> displayed_cc(double y, double ax, double al) {
  const double q1 = y;
  const double q2 = std::min(q1, (2 * y * y + 3 * y + (1 - al)) / (4 * y + 4 + ax));
  const double q3 = std::min(q2, 2 * (y * y + (2 - al / 2) * y + (1 - al)) / (3 * (2 * y + 2 + ax - al)));
  return {q1, q2, q3};
}

std::array<double, 3> displayed_ring123(double y, double ax, double al) {
  const double q1 = y;
  const double q2 = std::min(q1, (y * y + 2 * y + (1 - al)) / (2 * y + 2 + ax));
  const double q3 =
      std::min(q2, (y * y * y + 3 * y * y + 3 * y + (1 - al * al)) / (3 * y * y + (6 + 2 * ax) * y + (3 + ax * (2 + al))));
  return {q1, q2, q3};
}

std::array<double, 3> displayed_ring132(double y, double ax, double al) {
  const double q1 = y;
  const double cut = 0.5 * (1 - ax + std::sqrt((1 - ax) * (1 - ax) + 8 * (1 - al)));
  const double cubic = y * y * y + 3 * y * y + 3 * y + (1 - al * al);
  if (y >= cut) {
    const double q2 = y / 2;
    const double q3 = std::min(q2, cubic / (3 * y * y + (6 + ax) * y + (3 + ax * (1 + 2 * al))));
    return {q1, q2, q3};
  }
  const double q3 = std::min(q1, (y * y + 2 * y + (1 - al)) / (3 * y + 3 + ax));
  const double q2 = std::min(q3, cubic / (2 * y * y + (4 + 3 * ax) * y + (2 + ax * (3 + al))));
  return {q1, q2, q3};
}

double grid_q(SpecialNetwork kind, double y, double ax, double al, int bank) {
  const ThreeBankParams p = special_network_params(kind, y);
  return solvency_thresholds(three_bank_network(p), three_bank_shock(p), ClearingParams{0.0, ax, al})(bank);
}

}  // namespace

TEST_CASE("special network parameters") {
  const ThreeBankParams cc = special_network_params(SpecialNetwork::kCompletelyConnected, 1.0);
  CHECK(cc.lambda == 0.5);
  CHECK(cc.xi == 0.5);
  CHECK(three_bank_network(cc) == complete_regular_network(3, 1.0));
  CHECK(special_network_params(SpecialNetwork::kRing123, 1.0).lambda == 1.0);
  CHECK(special_network_params(SpecialNetwork::kRing132, 1.0).xi == 1.0);
  CHECK(parse_special_network("ring132") == SpecialNetwork::kRing132);
  CHECK_THROWS_AS(parse_special_network("star"), ValidationError);
  CHECK(default_y_grid().size() == 30);
  CHECK(default_y_grid().front() == doctest::Approx(0.1));
  CHECK(default_y_grid().back() == doctest::Approx(3.0));
}

TEST_CASE("compressed three-bank closed form is (y, y/2, y/3)") {
  for (double y : default_y_grid()) {
    const auto q = three_bank_thresholds(special_network_params(SpecialNetwork::kCompressed, y), {});
    CHECK(q[0] == doctest::Approx(y));
    CHECK(q[1] == doctest::Approx(y / 2));
    CHECK(q[2] == doctest::Approx(y / 3));
  }
}

TEST_CASE("closed form requires mu = 0") {
  CHECK_THROWS_AS(three_bank_thresholds(ThreeBankParams{}, ClearingParams{0.1, 1.0, 1.0}), ValidationError);
}

TEST_CASE("displayed special-network thresholds agree with the generic engine") {
  using Display = std::array<double, 3> (*)(double, double, double);
  const std::pair<SpecialNetwork, Display> cases[] = {{SpecialNetwork::kCompletelyConnected, displayed_cc},
                                                      {SpecialNetwork::kRing123, displayed_ring123},
                                                      {SpecialNetwork::kRing132, displayed_ring132}};
  for (const auto& [kind, display] : cases) {
    for (double y : {0.2, 0.6, 1.0, 1.7, 2.8}) {
      for (double ax : {0.0, 0.5, 1.0}) {
        for (double al : {0.0, 0.5, 1.0}) {
          const auto d = display(y, ax, al);
          for (int b = 0; b < 3; ++b) {
            INFO(to_string(kind), " y=", y, " ax=", ax, " al=", al, " bank ", b + 1);
            CHECK(grid_q(kind, y, ax, al, b) == doctest::Approx(d[static_cast<std::size_t>(b)]).epsilon(1e-6));
          }
        }
      }
    }
  }
}

TEST_CASE("ring 123 second threshold at y = 1 with full recovery") {
  // (1 + 2 + 0) / (2 + 2 + 1) = 3/5.
  const auto q = three_bank_thresholds(special_network_params(SpecialNetwork::kRing123, 1.0), {});
  CHECK(q[1] == doctest::Approx(0.6));
}

TEST_CASE("fragility report orderings at alpha = 0.5") {
  const FragilityReport rep = robust_fragility_report(default_y_grid(), ClearingParams{0.0, 0.5, 0.5});
  CHECK(rep.rows.size() == 30);
  CHECK(rep.all_cc_below_ring123());
  CHECK(rep.all_cc_above_ring132());
  CHECK(rep.all_compressed_lowest());
  const std::string csv = rep.to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') >= 31);
  CHECK_THROWS_AS(robust_fragility_report({}, {}), ValidationError);
}

TEST_CASE("balance sheets: validation and CSV round trip") {
  CHECK_THROWS_AS((EbaBalanceSheet{"x", 10.0, 5.0, 6.0}.validate()), ValidationError);
  CHECK_THROWS_AS((EbaBalanceSheet{"x", -1.0, 0.0, 0.0}.validate()), ValidationError);
  const auto sheets = synthetic_eba_sheets(12, 3);
  CHECK(sheets.size() == 12);
  for (const auto& s : sheets) CHECK_NOTHROW(s.validate());
  const auto back = parse_eba_sheets(eba_sheets_to_csv(sheets));
  REQUIRE(back.size() == sheets.size());
  for (std::size_t i = 0; i < sheets.size(); ++i) {
    CHECK(back[i].name == sheets[i].name);
    CHECK(back[i].total_assets == sheets[i].total_assets);
    CHECK(back[i].capital == sheets[i].capital);
    CHECK(back[i].interbank_liabilities == sheets[i].interbank_liabilities);
  }
  CHECK(synthetic_eba_sheets(12, 3)[5].total_assets == sheets[5].total_assets);
  CHECK_THROWS_AS(parse_eba_sheets("name,assets\nA,1\n"), ParseError);
  CHECK_THROWS_AS(parse_eba_sheets("name,total_assets,capital,interbank_liabilities\nA,1,x,0\n"), ParseError);
}

TEST_CASE("calibration of a single bank without interbank liabilities") {
  const std::vector<EbaBalanceSheet> sheets{{"A", 100.0, 10.0, 0.0}};
  const EbaCalibration cal = eba_calibrate(sheets, 0.2);
  CHECK(cal.network.size() == 1);
  CHECK(cal.network.societal(0) == doctest::Approx(90.0));
  CHECK(cal.shock.riskless(0) == doctest::Approx(0.8 * (100.0 - 0.2 * 90.0)));
  CHECK(cal.shock.risky(0) == doctest::Approx(0.2 * (100.0 - 0.2 * 90.0)));
  CHECK(cal.shock.rate == 0.0);
  CHECK(cal.shock.volatility == doctest::Approx(0.2));
}

TEST_CASE("calibration of two banks with equal interbank totals is a 2-cycle") {
  const std::vector<EbaBalanceSheet> sheets{{"A", 100.0, 10.0, 30.0}, {"B", 80.0, 5.0, 30.0}};
  const EbaCalibration cal = eba_calibrate(sheets, 0.0);
  CHECK(cal.network.interbank(0, 1) == doctest::Approx(30.0));
  CHECK(cal.network.interbank(1, 0) == doctest::Approx(30.0));
  CHECK(cal.network.societal(0) == doctest::Approx(60.0));
  CHECK(cal.network.societal(1) == doctest::Approx(45.0));
}

TEST_CASE("calibrated synthetic sheets match margins and the net-worth identity") {
  const auto sheets = synthetic_eba_sheets(30, 11);
  for (double mu : {0.0, 0.2, 0.4}) {
    const EbaCalibration cal = eba_calibrate(sheets, mu);
    const Matrix inter = cal.network.interbank_block();
    const Vector pbar = cal.network.total_obligations();
    for (std::size_t i = 0; i < sheets.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      const double target = sheets[i].interbank_liabilities;
      CHECK(std::abs(inter.row(k).sum() - target) <= 1e-8 * std::max(1.0, target));
      CHECK(std::abs(inter.col(k).sum() - target) <= 1e-8 * std::max(1.0, target));
      const double assets = sheets[i].total_assets;
      CHECK(std::abs(sheets[i].capital - (assets - pbar(k))) <= 1e-9 * assets);
      const double base = assets - target - mu * pbar(k);
      CHECK(cal.shock.riskless(k) == doctest::Approx(0.8 * base));
      CHECK(cal.shock.risky(k) == doctest::Approx(0.2 * base));
    }
    CHECK(cal.margin_error <= 1e-8);
  }
}

TEST_CASE("calibration rejects a margin too large for the balance sheets") {
  const std::vector<EbaBalanceSheet> sheets{{"A", 100.0, 10.0, 30.0}, {"B", 80.0, 5.0, 30.0}};
  CHECK_THROWS_AS(eba_calibrate(sheets, 0.9), ValidationError);
  CHECK_THROWS_AS(eba_calibrate({{"A", 100.0, 10.0, 30.0}}, 0.0), ValidationError);
}

TEST_CASE("scenario list of the compression tables") {
  const auto& sc = eba_scenarios();
  REQUIRE(sc.size() == 4);
  CHECK(sc[0].kind == CompressionKind::kBilateral);
  CHECK(sc[1].kind == CompressionKind::kConservative);
  CHECK(sc[2].kind == CompressionKind::kNonconservative);
  CHECK(sc[2].fix_society);
  CHECK(sc[3].kind == CompressionKind::kNonconservative);
  CHECK_FALSE(sc[3].fix_society);
}

TEST_CASE("small compression table: optimal never worse than original or maximal") {
  EbaTableOptions opt;
  opt.mus = {0.0, 0.2};
  opt.ga.population_size = 12;
  opt.ga.elite_count = 2;
  opt.ga.max_generations = 15;
  opt.ga.stall_generations = 5;
  const auto rows = eba_compression_table(synthetic_eba_sheets(6, 2), opt);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    REQUIRE(row.cells.size() == 4);
    for (const auto& cell : row.cells) {
      CHECK(cell.optimal <= row.original + 1e-9 * (1.0 + std::abs(row.original)));
      CHECK(cell.optimal <= cell.maximal + 1e-9 * (1.0 + std::abs(cell.maximal)));
    }
  }
  const std::string csv = eba_table_csv(rows);
  CHECK(csv.rfind("mu,compression,original,", 0) == 0);
}

TEST_CASE("subset-sum instances and oracle") {
  CHECK(subset_sum_oracle({{1, 2, 3}, 3}).solvable);
  CHECK_FALSE(subset_sum_oracle({{2, 4, 6}, 5}).solvable);
  const SubsetSumAnswer a = subset_sum_oracle({{5, 1, 7, 2}, 8});
  REQUIRE(a.solvable);
  long long sum = 0;
  for (auto i : a.witness) sum += std::vector<long long>{5, 1, 7, 2}[i];
  CHECK(sum == 8);
  CHECK_THROWS_AS((SubsetSumInstance{{1, 2}, 3}.validate()), ValidationError);
  CHECK_THROWS_AS((SubsetSumInstance{{1, 0}, 1}.validate()), ValidationError);
}

TEST_CASE("property: enumeration oracle agrees with dynamic programming") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    const SubsetSumInstance inst = random_subset_sum_instance(rng, testing::uniform_index(rng, 1, 12), 30);
    CHECK_NOTHROW(inst.validate());
    CHECK(subset_sum_oracle(inst).solvable == dp_subset_sum(inst.S, inst.theta));
  }
}

TEST_CASE("rerouting reduction network for S = {1,2,3}, theta = 3") {
  const SubsetSumInstance inst{{1, 2, 3}, 3};
  const LiabilityNetwork net = subset_sum_network(inst, SubsetSumModel::kRerouting);
  REQUIRE(net.size() == 5);
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t p = subset_sum_periphery_index(SubsetSumModel::kRerouting, i);
    CHECK(net.interbank(p, 0) == doctest::Approx(0.5 * static_cast<double>(i + 1)));
    CHECK(net.interbank(p, 1) == doctest::Approx(0.5 * static_cast<double>(i + 1)));
  }
  const Vector np = net_positions(net);
  CHECK(np(0) == doctest::Approx(-3.0));
  CHECK(np(1) == doctest::Approx(-3.0));
  for (std::size_t i = 0; i < 3; ++i) CHECK(np(static_cast<Eigen::Index>(2 + i)) == doctest::Approx(i + 1.0));
}

TEST_CASE("property: reduction net positions") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const SubsetSumInstance inst = random_subset_sum_instance(rng, testing::uniform_index(rng, 2, 10), 20);
    const auto K = static_cast<double>(inst.K()), theta = static_cast<double>(inst.theta);
    const Vector r = net_positions(subset_sum_network(inst, SubsetSumModel::kRerouting));
    CHECK(r(0) == doctest::Approx(-theta));
    CHECK(r(1) == doctest::Approx(-(K - theta)));
    const Vector c = net_positions(subset_sum_network(inst, SubsetSumModel::kConservative));
    CHECK(std::abs(c(0)) < 1e-9);
    CHECK(c(1) == doctest::Approx(-theta));
    CHECK(c(2) == doctest::Approx(-(K - theta)));
    for (std::size_t i = 0; i < inst.S.size(); ++i) {
      const auto k = static_cast<double>(inst.S[i]);
      CHECK(r(static_cast<Eigen::Index>(subset_sum_periphery_index(SubsetSumModel::kRerouting, i))) ==
            doctest::Approx(k));
      CHECK(c(static_cast<Eigen::Index>(subset_sum_periphery_index(SubsetSumModel::kConservative, i))) ==
            doctest::Approx(k));
    }
  }
}

TEST_CASE("property: a zero-entropy 0/1 assignment exists exactly for solvable instances") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 60; ++trial) {
    const SubsetSumInstance inst = random_subset_sum_instance(rng, testing::uniform_index(rng, 2, 8), 15);
    const bool solvable = dp_subset_sum(inst.S, inst.theta);
    const std::size_t n = inst.S.size();
    for (auto model : {SubsetSumModel::kRerouting, SubsetSumModel::kConservative}) {
      const ConstraintSpec spec = subset_sum_spec(inst, model);
      bool found = false;
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1U ? 1.0 : 0.0;
        const LiabilityNetwork cand = subset_sum_assignment(inst, model, x);
        if (!is_feasible(cand, spec).feasible) continue;
        CHECK(entropy(cand) == 0.0);
        found = true;
      }
      CHECK(found == solvable);
    }
  }
}

TEST_CASE("unsolvable instance S = {2,4}, theta = 3 has strictly positive entropy on the rerouting set") {
  const SubsetSumInstance inst{{2, 4}, 3};
  const ConstraintSpec spec = subset_sum_spec(inst, SubsetSumModel::kRerouting);
  double best = kInfinity;
  // 2 x1 + 4 x2 = 3 with x in [0,1]^2: x2 = (3 − 2 x1)/4.
  for (int k = 0; k <= 1000; ++k) {
    const double x1 = k / 1000.0;
    const double x2 = (3.0 - 2.0 * x1) / 4.0;
    const LiabilityNetwork cand = subset_sum_assignment(inst, SubsetSumModel::kRerouting, {x1, x2});
    REQUIRE(is_feasible(cand, spec).feasible);
    best = std::min(best, entropy(cand));
  }
  CHECK(best > 0.1);
  GAConfig cfg;
  cfg.population_size = 16;
  cfg.elite_count = 2;
  cfg.max_generations = 100;
  const GAResult res = ga_optimize(Objective::entropy(), spec, cfg);
  CHECK(res.best_value > 0.1);
}

TEST_CASE("GA finds a zero-entropy network for S = {1,2,3}, theta = 3") {
  const SubsetSumInstance inst{{1, 2, 3}, 3};
  for (auto model : {SubsetSumModel::kRerouting, SubsetSumModel::kConservative}) {
    GAConfig cfg;
    cfg.population_size = 24;
    cfg.target_value = 1e-4;
    const GAResult res = ga_optimize(Objective::entropy(), subset_sum_spec(inst, model), cfg);
    CHECK(res.best_value < 1e-3);
  }
}
