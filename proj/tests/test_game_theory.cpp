#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "pdpca/deflation.hpp"
#include "pdpca/errors.hpp"
#include "pdpca/game_theory.hpp"

using namespace pdpca;

TEST_CASE("utility examples") {
  const auto s = SymMatrix::diagonal({3, 2});
  const Vector v = normalize(Vector{1, 1});
  const std::vector<Vector> e1{Vector::basis(2, 0)};
  CHECK(utility_U(Vector::basis(2, 0), {}, s) == 3.0);
  // e1^T S v = 3/sqrt(2), so 2.5 - 4.5/3; e1 is exact, so this also equals utility_V
  CHECK(utility_U(v, e1, s) == doctest::Approx(1.0));
  CHECK(utility_V(v, {}, s) == doctest::Approx(2.5));
  CHECK(utility_V(Vector::basis(2, 1), e1, s) == 2.0);
  CHECK(utility_V(v, e1, s) == doctest::Approx(1.0));
}

TEST_CASE("utility_V is the deflated Rayleigh quotient") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 9;
    const auto s = oracle::compose(oracle::gapped_spectrum(d, 0.05, rng), oracle::random_basis(d, rng));
    std::vector<Vector> peers;
    for (std::size_t i = 0; i < trial % d; ++i) peers.push_back(oracle::random_unit(d, rng));
    const Vector v = oracle::random_unit(d, rng);
    CHECK(std::abs(utility_V(v, peers, s) - rayleigh(deflate(s, peers), v)) < 1e-12);
  }
}

TEST_CASE("utility_U equals utility_V at exact peers") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 3 + trial % 7;
    const auto basis = oracle::random_basis(d, rng);
    const auto values = oracle::gapped_spectrum(d, 0.05, rng);
    const auto s = oracle::compose(values, basis);
    const std::span<const Vector> peers(basis.data(), 1 + trial % (d - 1));
    const Vector v = oracle::random_unit(d, rng);
    double expect = rayleigh(s, v);
    for (std::size_t i = 0; i < peers.size(); ++i) expect -= values[i] * dot(v, peers[i]) * dot(v, peers[i]);
    CHECK(std::abs(utility_U(v, peers, s) - utility_V(v, peers, s)) < 1e-10);
    CHECK(std::abs(utility_U(v, peers, s) - expect) < 1e-10);
  }
}

TEST_CASE("utilities ignore players after k") {
  std::mt19937_64 rng(3);
  const auto s = oracle::compose(oracle::gapped_spectrum(6, 0.1, rng), oracle::random_basis(6, rng));
  std::vector<Vector> players;
  for (int i = 0; i < 5; ++i) players.push_back(oracle::random_unit(6, rng));
  const Vector v = players[2];
  const std::span<const Vector> before(players.data(), 2);
  const double u = utility_U(v, before, s), w = utility_V(v, before, s);
  std::swap(players[3], players[4]);
  CHECK(utility_U(v, std::span<const Vector>(players.data(), 2), s) == u);
  CHECK(utility_V(v, std::span<const Vector>(players.data(), 2), s) == w);
}

TEST_CASE("nash check at the eigenbasis of diag(3,2,1)") {
  const auto s = SymMatrix::diagonal({3, 2, 1});
  const std::vector<Vector> cand{Vector::basis(3, 0), Vector::basis(3, 1), Vector::basis(3, 2)};
  const auto reports = nash_check(s, cand, {1000, 0.1, 1e-3, 4});
  REQUIRE(reports.size() == 3);
  for (const auto& r : reports) {
    CHECK(r.strict);
    CHECK(r.n_samples == 1000);
    CHECK(r.value_at_candidate > r.max_perturbed_value);
  }
}

TEST_CASE("nash check flags swapped candidates") {
  const auto s = SymMatrix::diagonal({3, 2, 1});
  const std::vector<Vector> cand{Vector::basis(3, 1), Vector::basis(3, 0), Vector::basis(3, 2)};
  const auto reports = nash_check(s, cand, {1000, 0.1, 1e-3, 4});
  CHECK_FALSE(reports[0].strict);
}

TEST_CASE("nash check accepts a sign-flipped candidate") {
  const auto s = SymMatrix::diagonal({3, 2, 1});
  const auto reports = nash_check(s, std::vector<Vector>{-Vector::basis(3, 0)}, {200, 0.1, 1e-3, 0});
  CHECK(reports[0].strict);
}

TEST_CASE("nash check requires a strictly decreasing spectrum") {
  const std::vector<Vector> cand{Vector::basis(3, 0), Vector::basis(3, 1)};
  try {
    nash_check(SymMatrix::diagonal({3, 2, 2}), cand);
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Spectrum);
  }
  CHECK_THROWS_AS(nash_check(SymMatrix::diagonal({3, 2, 1}), cand, {0, 0.1, 1e-3, 0}), Error);
}

TEST_CASE("perturbation angles stay within the requested band") {
  // with one peer fixed the value at angle t from u_2 is
  // l2 cos^2 t + sin^2 t * (mix of l3 and a deflated l1 term), so the
  // drop is at least (l2 - l3) sin^2(min_angle)
  const auto s = SymMatrix::diagonal({3, 2, 1});
  const std::vector<Vector> cand{Vector::basis(3, 0), Vector::basis(3, 1)};
  const auto r = nash_check(s, cand, {500, 0.2, 0.1, 9});
  CHECK(r[1].value_at_candidate - r[1].max_perturbed_value >= std::pow(std::sin(0.1), 2) * 1.0 - 1e-12);
  CHECK(r[1].value_at_candidate - r[1].max_perturbed_value <= std::pow(std::sin(0.2), 2) * 2.0 + 1e-12);
}
