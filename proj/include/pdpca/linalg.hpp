#pragma once

// Dense vector / symmetric-matrix primitives and the Jacobi reference
// eigensolver used as ground truth throughout the library.
//
// Every reduction accumulates in long double in ascending index order, so
// results do not depend on which thread performs them.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pdpca {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {}
  Vector(std::initializer_list<double> entries) : data_(entries) {}
  explicit Vector(std::vector<double> entries) : data_(std::move(entries)) {}

  static Vector basis(std::size_t dim, std::size_t index);

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> view() noexcept { return data_; }
  std::span<const double> view() const noexcept { return data_; }
  const std::vector<double>& entries() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator-(const Vector& a);
Vector operator*(double alpha, const Vector& a);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double distance(const Vector& a, const Vector& b);
bool is_finite(const Vector& v);

// a + alpha * b
Vector add_scaled(const Vector& a, double alpha, const Vector& b);

// Upper bound on d*d entries any SymMatrix may hold. Guards against
// accidentally materialising a covariance at streaming scale.
std::size_t dense_capacity() noexcept;
void set_dense_capacity(std::size_t entries) noexcept;

class ScopedDenseCapacity {
 public:
  explicit ScopedDenseCapacity(std::size_t entries);
  ~ScopedDenseCapacity();
  ScopedDenseCapacity(const ScopedDenseCapacity&) = delete;
  ScopedDenseCapacity& operator=(const ScopedDenseCapacity&) = delete;

 private:
  std::size_t previous_;
};

// Dense real symmetric matrix, row-major. Construction from arbitrary
// entries stores (A + A^T) / 2.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t dim);
  SymMatrix(std::size_t dim, std::vector<double> row_major);

  static SymMatrix identity(std::size_t dim);
  static SymMatrix diagonal(std::span<const double> diag);
  static SymMatrix diagonal(std::initializer_list<double> diag);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * dim_, dim_);
  }
  const std::vector<double>& entries() const noexcept { return data_; }

  // this += alpha * v v^T
  void add_rank_one(double alpha, const Vector& v);
  // this *= alpha
  void scale(double alpha);

  double frobenius_norm() const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

class DataMatrix {
 public:
  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::size_t cols);
  DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_).subspan(i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(data_).subspan(i * cols_, cols_);
  }
  const std::vector<double>& entries() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct EigenSystem {
  std::vector<double> values;   // non-increasing
  std::vector<Vector> vectors;  // unit norm, orthogonal, sign-normalised

  std::size_t size() const noexcept { return values.size(); }
};

// Y^T Y.
SymMatrix covariance(const DataMatrix& y);

Vector matvec(const SymMatrix& a, const Vector& x);
double rayleigh(const SymMatrix& a, const Vector& v);

// Y x  (length rows) and Y^T y (length cols); neither forms Y^T Y.
Vector multiply(const DataMatrix& y, const Vector& x);
Vector multiply_transpose(const DataMatrix& y, const Vector& r);

struct JacobiOptions {
  double off_diagonal_tolerance = 1e-13;  // relative to ||A||_F
  int max_sweeps = 100;
};

// Cyclic Jacobi. Eigenvalues sorted non-increasing; vectors follow
// sign_normalize.
EigenSystem reference_eigh(const SymMatrix& a, const JacobiOptions& options = {});

// Largest |eigenvalue|.
double spectral_norm(const SymMatrix& a);

// v or -v, whichever has non-negative inner product with ref. An exactly
// orthogonal pair returns v.
Vector sign_align(const Vector& v, const Vector& ref);

// Flip so the largest-magnitude entry is non-negative (lowest index wins
// ties).
Vector sign_normalize(const Vector& v);

// Throws ErrorKind::Degenerate when ||v|| < 1e-300.
Vector normalize(const Vector& v);

// min over s in {+1,-1} of ||a - s b||.
double sign_invariant_distance(const Vector& a, const Vector& b);

}  // namespace pdpca
