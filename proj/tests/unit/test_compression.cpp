#include "netcomp/compression.hpp"
#include "netcomp/errors.hpp"
#include "netcomp/objectives.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace netcomp;

namespace {

constexpr CompressionKind kKinds[] = {CompressionKind::kBilateral, CompressionKind::kConservative,
                                      CompressionKind::kRerouting, CompressionKind::kNonconservative};

// Interbank matrix given as (from, to, amount) with 1-based banks.
// Kept as a raw matrix so that infeasible (negative) candidates can be checked.
Matrix three_bank(std::initializer_list<std::tuple<int, int, double>> edges) {
  Matrix L = Matrix::Zero(3, 4);
  for (const auto& [i, j, a] : edges) L(i - 1, j) = a;
  return L;
}

LiabilityNetwork figure_left() {
  return LiabilityNetwork(three_bank({{1, 2, 1}, {2, 1, 10}, {2, 3, 2}, {3, 2, 20}, {3, 1, 3}, {1, 3, 30}}));
}

Matrix figure_bilateral(double m1, double m2, double m3) {
  return three_bank({{1, 2, 1 - m1}, {2, 1, 10 - m1}, {2, 3, 2 - m2}, {3, 2, 20 - m2}, {3, 1, 3 - m3}, {1, 3, 30 - m3}});
}

Matrix figure_cycles(double a, double b) {
  return three_bank({{1, 2, 1 - a}, {2, 3, 2 - a}, {3, 1, 3 - a}, {2, 1, 10 - b}, {3, 2, 20 - b}, {1, 3, 30 - b}});
}

// Random member of the set: projection of a random point of the box.
LiabilityNetwork random_member(std::mt19937_64& rng, const ConstraintSpec& spec) {
  const FeasibleRegion region(spec);
  Vector y(static_cast<Eigen::Index>(region.dimension()));
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    const double u = region.upper()(k);
    y(k) = testing::uniform(rng, 0.0, std::isfinite(u) ? u : 10.0);
  }
  return region.to_network(region.project(y));
}

double max_abs(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("the base network belongs to every compression set") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, testing::uniform_index(rng, 1, 6));
    for (auto kind : kKinds) {
      for (bool fix : {false, true}) CHECK(is_feasible(base, ConstraintSpec{base, kind, fix}).feasible);
    }
  }
}

TEST_CASE("bilateral netting of the first example network") {
  const ConstraintSpec spec{figure_left(), CompressionKind::kBilateral, false};
  CHECK(is_feasible(figure_bilateral(1, 2, 3), spec).feasible);
  CHECK(is_feasible(figure_bilateral(0.5, 0.0, 2.0), spec).feasible);
  CHECK_FALSE(is_feasible(figure_bilateral(1.5, 2, 3), spec).feasible);
  CHECK_FALSE(is_feasible(figure_bilateral(1, 2, -1), spec).feasible);
}

TEST_CASE("cycle adjustment: rerouting allows α + β = 0, conservative does not exceed the base") {
  const LiabilityNetwork base = figure_left();
  const Matrix moved = figure_cycles(1.0, -1.0);
  CHECK(is_feasible(moved, ConstraintSpec{base, CompressionKind::kRerouting, false}).feasible);
  CHECK(is_feasible(moved, ConstraintSpec{base, CompressionKind::kNonconservative, false}).feasible);
  const FeasibilityReport cons = is_feasible(moved, ConstraintSpec{base, CompressionKind::kConservative, false});
  CHECK_FALSE(cons.feasible);
  CHECK(cons.max_violation == doctest::Approx(1.0));
  CHECK(is_feasible(figure_cycles(0.5, 4.0), ConstraintSpec{base, CompressionKind::kConservative, false}).feasible);
  // Rerouting needs α + β = 0; nonconservative only α + β >= 0.
  CHECK_FALSE(is_feasible(figure_cycles(1.0, 2.0), ConstraintSpec{base, CompressionKind::kRerouting, false}).feasible);
  CHECK(is_feasible(figure_cycles(1.0, 2.0), ConstraintSpec{base, CompressionKind::kNonconservative, false}).feasible);
  CHECK_FALSE(
      is_feasible(figure_cycles(1.0, -2.0), ConstraintSpec{base, CompressionKind::kNonconservative, false}).feasible);
}

TEST_CASE("maximal bilateral compression of the first example network") {
  for (auto route : {0, 1}) {
    const ConstraintSpec spec{figure_left(), CompressionKind::kBilateral, false};
    const LiabilityNetwork out = route == 0 ? maximal_compression(spec) : maximal_compression_lp(spec);
    CHECK(out.interbank(1, 0) == doctest::Approx(9.0));
    CHECK(out.interbank(2, 1) == doctest::Approx(18.0));
    CHECK(out.interbank(0, 2) == doctest::Approx(27.0));
    CHECK(std::abs(out.interbank(0, 1)) < 1e-9);
    CHECK(std::abs(out.interbank(1, 2)) < 1e-9);
    CHECK(std::abs(out.interbank(2, 0)) < 1e-9);
    CHECK(gross_notional(out) == doctest::Approx(54.0));
  }
}

TEST_CASE("conservative compression removes an equal-weight ring") {
  ThreeBankParams p;
  p.lambda = 1.0;
  p.xi = 0.0;
  p.y = 0.7;
  const LiabilityNetwork base = three_bank_network(p);
  const LiabilityNetwork out = maximal_compression(ConstraintSpec{base, CompressionKind::kConservative, false});
  CHECK(out.interbank_block().cwiseAbs().maxCoeff() < 1e-9);
  CHECK((out.societal_column() - base.societal_column()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("an acyclic network without opposing edges cannot be compressed conservatively") {
  const LiabilityNetwork base = parse_network_csv("from,to,amount\n1,2,5\n2,3,3\n1,3,1\n1,0,2\n3,0,1\n");
  const LiabilityNetwork out = maximal_compression(ConstraintSpec{base, CompressionKind::kConservative, false});
  CHECK((out.matrix() - base.matrix()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("feasibility rejects mismatched dimensions") {
  std::mt19937_64 rng(2);
  const LiabilityNetwork a = testing::random_network(rng, 3);
  const LiabilityNetwork b = testing::random_network(rng, 4);
  CHECK_THROWS_AS(is_feasible(b, ConstraintSpec{a, CompressionKind::kRerouting, false}), ValidationError);
}

TEST_CASE("repair leaves a feasible candidate unchanged") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, testing::uniform_index(rng, 2, 6));
    for (auto kind : kKinds) {
      const ConstraintSpec spec{base, kind, false};
      CHECK(repair(base.matrix(), spec) == base);
      const LiabilityNetwork member = random_member(rng, spec);
      CHECK((repair(member.matrix(), spec).matrix() - member.matrix()).cwiseAbs().maxCoeff() <= 1e-7);
    }
  }
}

TEST_CASE("property: repaired candidates are feasible and no farther than the base") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = testing::uniform_index(rng, 2, 7);
    const LiabilityNetwork base = testing::random_network(rng, n);
    for (auto kind : kKinds) {
      for (bool fix : {false, true}) {
        const ConstraintSpec spec{base, kind, fix};
        Matrix cand = base.matrix();
        for (Eigen::Index i = 0; i < cand.rows(); ++i) {
          for (Eigen::Index j = 0; j < cand.cols(); ++j) {
            if (j == i + 1) continue;
            cand(i, j) = std::max(0.0, cand(i, j) + testing::uniform(rng, -4.0, 4.0));
          }
        }
        const LiabilityNetwork out = repair(cand, spec);
        CHECK(is_feasible(out, spec).feasible);
        CHECK((out.matrix() - cand).norm() <= (base.matrix() - cand).norm() + 1e-9);
        CHECK(max_abs(net_positions(out) - net_positions(base)) <= 1e-6);
      }
    }
  }
}

TEST_CASE("property: inclusion structure of the compression sets") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, testing::uniform_index(rng, 2, 6));
    const auto spec = [&](CompressionKind k) { return ConstraintSpec{base, k, false}; };
    const LiabilityNetwork bil = random_member(rng, spec(CompressionKind::kBilateral));
    CHECK(is_feasible(bil, spec(CompressionKind::kConservative)).feasible);
    CHECK(is_feasible(bil, spec(CompressionKind::kNonconservative)).feasible);
    const LiabilityNetwork cons = random_member(rng, spec(CompressionKind::kConservative));
    CHECK(is_feasible(cons, spec(CompressionKind::kNonconservative)).feasible);
    const LiabilityNetwork rer = random_member(rng, spec(CompressionKind::kRerouting));
    CHECK(is_feasible(rer, spec(CompressionKind::kNonconservative)).feasible);
    const LiabilityNetwork fixed = random_member(rng, ConstraintSpec{base, CompressionKind::kNonconservative, true});
    CHECK(is_feasible(fixed, spec(CompressionKind::kNonconservative)).feasible);
    CHECK(max_abs(fixed.societal_column() - base.societal_column()) <= 1e-6);
  }
}

TEST_CASE("property: maximal compression is feasible, lighter than the base and keeps net positions") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, testing::uniform_index(rng, 2, 7));
    double previous = gross_notional(base);
    for (auto kind : kKinds) {
      const ConstraintSpec spec{base, kind, false};
      const LiabilityNetwork out = maximal_compression(spec);
      CHECK(is_feasible(out, spec).feasible);
      CHECK(gross_notional(out) <= gross_notional(base) + 1e-9);
      CHECK(max_abs(net_positions(out) - net_positions(base)) <= 1e-6);
      if (kind == CompressionKind::kConservative || kind == CompressionKind::kNonconservative) CHECK(gross_notional(out) <= previous + 1e-7);
      if (kind != CompressionKind::kRerouting) previous = gross_notional(out);
    }
  }
}

TEST_CASE("property: bilateral closed form equals the LP optimum") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, testing::uniform_index(rng, 2, 8), 0.7);
    const ConstraintSpec spec{base, CompressionKind::kBilateral, false};
    const Matrix a = maximal_compression(spec).matrix();
    const Matrix b = maximal_compression_lp(spec).matrix();
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("projection agrees with the Dykstra reference") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 15; ++trial) {
    const LiabilityNetwork base = testing::random_network(rng, testing::uniform_index(rng, 2, 5));
    for (auto kind : {CompressionKind::kConservative, CompressionKind::kRerouting, CompressionKind::kNonconservative}) {
      const FeasibleRegion region(ConstraintSpec{base, kind, false});
      Vector y(static_cast<Eigen::Index>(region.dimension()));
      for (Eigen::Index k = 0; k < y.size(); ++k) y(k) = testing::uniform(rng, -2.0, 12.0);
      const Vector fast = region.project(y);
      const Vector slow = region.project_dykstra(y);
      CHECK((fast - y).norm() <= (slow - y).norm() + 1e-6);
      CHECK((fast - slow).norm() <= 1e-4 * (1.0 + y.norm()));
    }
  }
}
