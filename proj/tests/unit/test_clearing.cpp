#include "netcomp/clearing.hpp"
#include "netcomp/errors.hpp"
#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace netcomp;

namespace {

LiabilityNetwork two_bank() { return parse_network_csv("from,to,amount\n1,0,1\n1,2,1\n2,0,1\n"); }

// Textbook Eisenberg-Noe iteration written out entry by entry.
Vector naive_en(const LiabilityNetwork& net, const Vector& x) {
  const std::size_t n = net.size();
  const Vector pbar = net.total_obligations();
  Vector p = pbar;
  for (int it = 0; it < 100000; ++it) {
    Vector next(p.size());
    for (std::size_t i = 0; i < n; ++i) {
      double inflow = x(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < n; ++j) {
        const double pj = pbar(static_cast<Eigen::Index>(j));
        if (pj > 0.0) inflow += net.interbank(j, i) / pj * p(static_cast<Eigen::Index>(j));
      }
      next(static_cast<Eigen::Index>(i)) = std::min(pbar(static_cast<Eigen::Index>(i)), inflow);
    }
    if ((next - p).cwiseAbs().maxCoeff() < 1e-14) return next;
    p = next;
  }
  return p;
}

}  // namespace

TEST_CASE("two-bank example: bank 2 is paid in full by bank 1") {
  // Hand arithmetic: bank 1 holds 2 and owes 2, so it pays in full; bank 2
  // receives half of that (1) and owes 1.
  const ClearingResult r = clearing_payments(Vector::Map(std::vector<double>{2.0, 0.0}.data(), 2), two_bank(), {});
  CHECK(r.payments(0) == doctest::Approx(2.0));
  CHECK(r.payments(1) == doctest::Approx(1.0));
  CHECK(std::abs(r.wealths(0)) < 1e-12);
  CHECK(std::abs(r.wealths(1)) < 1e-12);
  CHECK_FALSE(r.defaults[0]);
  CHECK_FALSE(r.defaults[1]);
}

TEST_CASE("two-bank example with a shortfall defaults bank 2") {
  Vector x(2);
  x << 1.0, 0.0;
  const ClearingResult r = clearing_payments(x, two_bank(), {});
  // Bank 1 pays 1 (all it has), bank 2 receives 0.5 of it.
  CHECK(r.payments(0) == doctest::Approx(1.0));
  CHECK(r.payments(1) == doctest::Approx(0.5));
  CHECK(r.wealths(0) == doctest::Approx(-1.0));
  CHECK(r.wealths(1) == doctest::Approx(-0.5));
  CHECK(r.defaults[0]);
  CHECK(r.defaults[1]);
}

TEST_CASE("full margin pays everything") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto net = testing::random_network(rng, 5);
    const Vector x = testing::random_endowments(rng, net);
    const ClearingParams cp{1.0, testing::uniform(rng), testing::uniform(rng)};
    const ClearingResult r = clearing_payments(x, net, cp);
    const auto rel = relative_liabilities(net);
    CHECK((r.payments - rel.pbar).cwiseAbs().maxCoeff() < 1e-12);
    const Vector v = x + rel.interbank().transpose() * rel.pbar;
    CHECK((r.wealths - v).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("empty network") {
  const LiabilityNetwork net(Matrix::Zero(3, 4));
  Vector x(3);
  x << 1.0, 0.0, 2.5;
  const ClearingResult r = clearing_payments(x, net, {});
  CHECK(r.payments.cwiseAbs().maxCoeff() == 0.0);
  CHECK(r.wealths == x);
  for (bool z : r.defaults) CHECK_FALSE(z);
  CHECK(wealths(x, net, {}) == x);
}

TEST_CASE("invalid inputs") {
  Vector x(2);
  x << -1.0, 0.0;
  CHECK_THROWS_AS(clearing_payments(x, two_bank(), {}), ValidationError);
  CHECK_THROWS_AS(clearing_payments(Vector::Zero(3), two_bank(), {}), ValidationError);
  CHECK_THROWS_AS((ClearingParams{1.5, 1.0, 1.0}.validate()), ValidationError);
  CHECK_THROWS_AS((ClearingParams{0.0, -0.1, 1.0}.validate()), ValidationError);
}

TEST_CASE("affine matrices in closed form") {
  std::mt19937_64 rng(2);
  const auto net = testing::random_network(rng, 4, 0.7);
  const auto rel = relative_liabilities(net);
  const Matrix pit = rel.interbank().transpose();
  const ClearingParams cp{0.3, 0.6, 0.4};
  const AffineWealth none = affine_matrices(DefaultSet(4, false), net, cp);
  CHECK((none.Delta - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  const Vector expected = ((1.0 - cp.mu) * Matrix::Identity(4, 4) - pit) * rel.pbar;
  CHECK((none.delta - expected).cwiseAbs().maxCoeff() < 1e-12);

  const AffineWealth all = affine_matrices(DefaultSet(4, true), net, ClearingParams{0.0, 0.0, 0.0});
  CHECK((all.Delta - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((all.delta - rel.pbar).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("singular recovery system is reported") {
  // Closed default cycle with no leakage to society and full interbank recovery.
  const auto ring = ring_network({1, 2, 3}, 0.0);
  CHECK_THROWS_AS(affine_matrices(DefaultSet(3, true), ring, ClearingParams{0.0, 1.0, 1.0}), SingularSystemError);
}

TEST_CASE("property: affine representation reproduces the fixed point") {
  std::mt19937_64 rng(3);
  int checked = 0;
  for (int t = 0; t < 300; ++t) {
    const auto net = testing::random_network(rng, testing::uniform_index(rng, 1, 10));
    const Vector x = testing::random_endowments(rng, net);
    const ClearingParams cp = testing::random_clearing(rng);
    const ClearingResult r = clearing_payments(x, net, cp);
    try {
      const AffineWealth a = affine_matrices(r.defaults, net, cp);
      const Vector v = a.Delta * x - a.delta;
      CHECK((v - r.wealths).cwiseAbs().maxCoeff() < 1e-9);
      ++checked;
    } catch (const SingularSystemError&) {
    }
  }
  CHECK(checked > 250);
}

TEST_CASE("property: Eisenberg-Noe special case") {
  std::mt19937_64 rng(4);
  const ClearingParams en{0.0, 1.0, 1.0};
  for (int t = 0; t < 200; ++t) {
    const auto net = testing::random_network(rng, testing::uniform_index(rng, 1, 10));
    const Vector x = testing::random_endowments(rng, net);
    const ClearingResult r = clearing_payments(x, net, en);
    const auto rel = relative_liabilities(net);
    const Vector rhs = (x + rel.interbank().transpose() * r.payments).cwiseMin(rel.pbar);
    CHECK((r.payments - rhs).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((r.payments - naive_en(net, x)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("property: result invariants and agreement with fictitious default") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto net = testing::random_network(rng, testing::uniform_index(rng, 1, 8));
    const Vector x = testing::random_endowments(rng, net);
    const ClearingParams cp = testing::random_clearing(rng);
    const ClearingResult r = clearing_payments(x, net, cp);
    const Vector pbar = net.total_obligations();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      CHECK(r.payments(i) >= -1e-12);
      CHECK(r.payments(i) <= pbar(i) + 1e-12);
      CHECK(r.defaults[static_cast<std::size_t>(i)] == (r.wealths(i) < 0.0));
      if (!r.defaults[static_cast<std::size_t>(i)]) CHECK(r.payments(i) == doctest::Approx(pbar(i)));
    }
    const ClearingResult fd = fictitious_default_payments(x, net, cp);
    CHECK((fd.payments - r.payments).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("property: monotone iteration from pbar is nonincreasing") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const auto net = testing::random_network(rng, testing::uniform_index(rng, 2, 8));
    const Vector x = testing::random_endowments(rng, net);
    const ClearingParams cp = testing::random_clearing(rng);
    const auto rel = relative_liabilities(net);
    Vector p = rel.pbar;
    for (int k = 0; k < 50; ++k) {
      const Vector next = clearing_map(p, x, rel, cp);
      CHECK((next - p).maxCoeff() <= 1e-12);
      p = next;
    }
  }
}

TEST_CASE("property: payments and wealths are monotone in endowments") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 200; ++t) {
    const auto net = testing::random_network(rng, testing::uniform_index(rng, 1, 8));
    const Vector x = testing::random_endowments(rng, net);
    Vector bump(x.size());
    for (Eigen::Index i = 0; i < bump.size(); ++i) bump(i) = testing::uniform(rng) < 0.5 ? 0.0 : testing::uniform(rng);
    const ClearingParams cp = testing::random_clearing(rng);
    const ClearingResult lo = clearing_payments(x, net, cp);
    const ClearingResult hi = clearing_payments(x + bump, net, cp);
    CHECK((lo.payments - hi.payments).maxCoeff() <= 1e-9);
    CHECK((lo.wealths - hi.wealths).maxCoeff() <= 1e-9);
  }
}

TEST_CASE("solver reuse matches one-shot clearing") {
  std::mt19937_64 rng(8);
  const auto net = testing::random_network(rng, 6);
  const ClearingParams cp = testing::random_clearing(rng);
  const ClearingSolver solver(net, cp);
  for (int t = 0; t < 20; ++t) {
    const Vector x = testing::random_endowments(rng, net);
    CHECK((solver.solve(x).payments - clearing_payments(x, net, cp).payments).cwiseAbs().maxCoeff() == 0.0);
  }
}
