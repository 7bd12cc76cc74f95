#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pdpca/errors.hpp"
#include "pdpca/linalg.hpp"
#include "pdpca/matrix_io.hpp"

using namespace pdpca;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("vector arithmetic") {
  const Vector a{1, 2, 3}, b{4, 5, 6};
  CHECK(dot(a, b) == 32.0);
  CHECK(norm2(Vector{3, 4}) == 5.0);
  CHECK(add_scaled(a, 2.0, b) == Vector{9, 12, 15});
  CHECK(a - b == Vector{-3, -3, -3});
  CHECK(-a == Vector{-1, -2, -3});
  CHECK(Vector::basis(3, 1) == Vector{0, 1, 0});
  CHECK(kind_of([&] { dot(a, Vector{1, 2}); }) == ErrorKind::Dimension);
}

TEST_CASE("normalize rejects the zero vector") {
  CHECK(kind_of([] { normalize(Vector(4)); }) == ErrorKind::Degenerate);
  CHECK(norm2(normalize(Vector{1e-200, 0})) == doctest::Approx(1.0));
}

TEST_CASE("covariance is Y^T Y") {
  const DataMatrix y(2, 2, {1, 2, 3, 4});
  const SymMatrix s = covariance(y);
  CHECK(s(0, 0) == 10.0);
  CHECK(s(0, 1) == 14.0);
  CHECK(s(1, 0) == 14.0);
  CHECK(s(1, 1) == 20.0);
  const Vector x{1, -1};
  CHECK(multiply_transpose(y, multiply(y, x)) == matvec(s, x));
}

TEST_CASE("symmetric construction averages the two triangles") {
  const SymMatrix s(2, {1, 2, 4, 3});
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
}

TEST_CASE("reference_eigh on small matrices") {
  SUBCASE("diagonal") {
    const auto es = reference_eigh(SymMatrix::diagonal({3, 1, 2}));
    CHECK(es.values == std::vector<double>{3, 2, 1});
    CHECK(es.vectors[0] == Vector::basis(3, 0));
    CHECK(es.vectors[1] == Vector::basis(3, 2));
    CHECK(es.vectors[2] == Vector::basis(3, 1));
  }
  SUBCASE("2x2 with known eigenpairs") {
    const auto es = reference_eigh(SymMatrix(2, {2, 1, 1, 2}));
    CHECK(es.values[0] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(es.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(es.vectors[0][0] == doctest::Approx(r));
    CHECK(es.vectors[0][1] == doctest::Approx(r));
    // tie in magnitude: the lower index carries the non-negative sign
    CHECK(es.vectors[1][0] == doctest::Approx(r));
    CHECK(es.vectors[1][1] == doctest::Approx(-r));
  }
  SUBCASE("1x1") {
    const auto es = reference_eigh(SymMatrix::diagonal({-2.5}));
    CHECK(es.values[0] == -2.5);
    CHECK(es.vectors[0] == Vector{1.0});
  }
}

TEST_CASE("reference_eigh reconstructs random symmetric matrices") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (std::size_t d : {2u, 5u, 17u, 40u}) {
    std::vector<double> a(d * d);
    for (double& x : a) x = g(rng);
    const SymMatrix s(d, a);
    const auto es = reference_eigh(s);
    for (std::size_t i = 0; i + 1 < d; ++i) CHECK(es.values[i] >= es.values[i + 1]);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        double rec = 0.0;
        for (std::size_t k = 0; k < d; ++k) rec += es.values[k] * es.vectors[k][i] * es.vectors[k][j];
        CHECK(std::abs(rec - s(i, j)) < 1e-10);
        CHECK(std::abs(dot(es.vectors[i], es.vectors[j]) - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("reference_eigh recovers a planted basis") {
  std::mt19937_64 rng(11);
  const auto basis = oracle::random_basis(12, rng);
  const auto values = oracle::gapped_spectrum(12, 0.05, rng);
  const auto es = reference_eigh(oracle::compose(values, basis));
  for (std::size_t k = 0; k < 12; ++k) {
    CHECK(es.values[k] == doctest::Approx(values[k]).epsilon(1e-12));
    CHECK(oracle::sign_aligned_distance(es.vectors[k], basis[k]) < 1e-9);
  }
}

TEST_CASE("reference_eigh reports non-convergence") {
  JacobiOptions opts;
  opts.max_sweeps = 0;
  CHECK(kind_of([&] { reference_eigh(SymMatrix(2, {1, 1, 1, 1}), opts); }) == ErrorKind::Numerical);
}

TEST_CASE("dense capacity cap") {
  ScopedDenseCapacity cap(100);
  CHECK_NOTHROW(SymMatrix(10));
  CHECK(kind_of([] { SymMatrix(11); }) == ErrorKind::Capacity);
  CHECK(kind_of([] { covariance(DataMatrix(2, 11)); }) == ErrorKind::Capacity);
}

TEST_CASE("capacity cap is restored on scope exit") {
  const auto before = dense_capacity();
  { ScopedDenseCapacity cap(4); }
  CHECK(dense_capacity() == before);
}

TEST_CASE("sign helpers") {
  const Vector v{0.6, -0.8};
  CHECK(sign_normalize(v) == Vector{-0.6, 0.8});
  CHECK(sign_align(v, Vector{-1, 0}) == Vector{-0.6, 0.8});
  CHECK(sign_invariant_distance(v, -v) == 0.0);
  CHECK(sign_invariant_distance(Vector{1, 0}, Vector{0, 1}) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("spectral norm takes the largest magnitude") {
  CHECK(spectral_norm(SymMatrix::diagonal({1, -3, 2})) == doctest::Approx(3.0));
}

TEST_CASE("errors carry context") {
  const Error e(ErrorKind::Stream, "exhausted");
  const Error c = e.with_context("worker 2, round 3");
  CHECK(c.kind() == ErrorKind::Stream);
  CHECK(std::string(c.what()) == "worker 2, round 3: exhausted");
}

TEST_CASE("PDM1 round trip") {
  const DataMatrix m(2, 3, {1.5, -2, 3, 1e-300, 5e300, -0.0});
  std::stringstream buf;
  write_pdm1(buf, m);
  CHECK(buf.str().size() == 4 + 16 + 6 * 8);
  CHECK(buf.str().substr(0, 4) == "PDM1");
  const DataMatrix back = read_pdm1(buf);
  CHECK(back.rows() == 2);
  CHECK(back.cols() == 3);
  CHECK(back.entries() == m.entries());
}

TEST_CASE("PDM1 rejects truncated input") {
  const DataMatrix m(2, 2, {1, 2, 3, 4});
  std::stringstream buf;
  write_pdm1(buf, m);
  std::stringstream cut(buf.str().substr(0, buf.str().size() - 3));
  CHECK(kind_of([&] { read_pdm1(cut); }) == ErrorKind::Io);
}

TEST_CASE("CSV matrices") {
  std::stringstream ok("1,2,3\n4,5,6\n");
  const DataMatrix m = read_csv_matrix(ok);
  CHECK(m.rows() == 2);
  CHECK(m(1, 2) == 6.0);
  std::stringstream ragged("1,2\n3\n");
  CHECK(kind_of([&] { read_csv_matrix(ragged); }) == ErrorKind::Io);
  std::stringstream bad("1,x\n");
  CHECK(kind_of([&] { read_csv_matrix(bad); }) == ErrorKind::Io);
}

TEST_CASE("load_matrix sniffs the format") {
  const auto dir = std::filesystem::temp_directory_path() / "pdpca_io_test";
  std::filesystem::create_directories(dir);
  const DataMatrix m(2, 2, {1, 2, 3, 4});
  write_pdm1(dir / "m.pdm1", m);
  write_file_atomic(dir / "m.csv", "1,2\n3,4\n");
  CHECK(load_matrix(dir / "m.pdm1").entries() == m.entries());
  CHECK(load_matrix(dir / "m.csv").entries() == m.entries());
  CHECK(!std::filesystem::exists(dir / "m.csv.tmp"));
  CHECK(kind_of([&] { load_matrix(dir / "missing.csv"); }) == ErrorKind::Io);
  std::filesystem::remove_all(dir);
}
