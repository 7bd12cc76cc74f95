#include "pdpca/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pdpca/errors.hpp"

namespace pdpca {

namespace {

std::atomic<std::size_t> g_dense_capacity{std::size_t{1} << 28};

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream msg;
    msg << what << ": size mismatch (" << a << " vs " << b << ")";
    fail(ErrorKind::Dimension, msg.str());
  }
}

void check_capacity(std::size_t dim) {
  const std::size_t cap = dense_capacity();
  if (dim != 0 && dim > cap / dim) {
    std::ostringstream msg;
    msg << "dense " << dim << "x" << dim << " matrix exceeds capacity of " << cap << " entries";
    fail(ErrorKind::Capacity, msg.str());
  }
}

}  // namespace

Vector Vector::basis(std::size_t dim, std::size_t index) {
  Vector e(dim);
  e[index] = 1.0;
  return e;
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "vector add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "vector subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector operator-(const Vector& a) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

Vector operator*(double alpha, const Vector& a) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = alpha * a[i];
  return out;
}

Vector add_scaled(const Vector& a, double alpha, const Vector& b) {
  require_same_size(a.size(), b.size(), "add_scaled");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + alpha * b[i];
  return out;
}

double dot(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "dot");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(acc);
}

double norm2(const Vector& v) {
  long double acc = 0.0L;
  for (double x : v) acc += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(acc));
}

double distance(const Vector& a, const Vector& b) { return norm2(a - b); }

bool is_finite(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

std::size_t dense_capacity() noexcept { return g_dense_capacity.load(); }
void set_dense_capacity(std::size_t entries) noexcept { g_dense_capacity.store(entries); }

ScopedDenseCapacity::ScopedDenseCapacity(std::size_t entries) : previous_(dense_capacity()) {
  set_dense_capacity(entries);
}
ScopedDenseCapacity::~ScopedDenseCapacity() { set_dense_capacity(previous_); }

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t dim) : dim_(dim) {
  check_capacity(dim);
  data_.assign(dim * dim, 0.0);
}

SymMatrix::SymMatrix(std::size_t dim, std::vector<double> row_major) : dim_(dim) {
  check_capacity(dim);
  require_same_size(row_major.size(), dim * dim, "SymMatrix entries");
  data_ = std::move(row_major);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double avg = 0.5 * (data_[i * dim + j] + data_[j * dim + i]);
      data_[i * dim + j] = avg;
      data_[j * dim + i] = avg;
    }
  }
}

SymMatrix SymMatrix::identity(std::size_t dim) {
  SymMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m.data_[i * dim + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

void SymMatrix::add_rank_one(double alpha, const Vector& v) {
  require_same_size(v.size(), dim_, "rank-one update");
  for (std::size_t i = 0; i < dim_; ++i) {
    const double avi = alpha * v[i];
    double* row = data_.data() + i * dim_;
    for (std::size_t j = 0; j < dim_; ++j) row[j] += avi * v[j];
  }
}

void SymMatrix::scale(double alpha) {
  for (double& x : data_) x *= alpha;
}

double SymMatrix::frobenius_norm() const {
  long double acc = 0.0L;
  for (double x : data_) acc += static_cast<long double>(x) * x;
  return static_cast<double>(std::sqrt(acc));
}

// ---------------------------------------------------------------------------
// DataMatrix

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DataMatrix::DataMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  require_same_size(data_.size(), rows * cols, "DataMatrix entries");
}

// ---------------------------------------------------------------------------

SymMatrix covariance(const DataMatrix& y) {
  const std::size_t d = y.cols();
  check_capacity(d);
  std::vector<double> entries(d * d, 0.0);
  std::vector<long double> acc(d);
  for (std::size_t a = 0; a < d; ++a) {
    std::fill(acc.begin(), acc.end(), 0.0L);
    for (std::size_t i = 0; i < y.rows(); ++i) {
      const auto r = y.row(i);
      const long double ya = r[a];
      for (std::size_t b = a; b < d; ++b) acc[b] += ya * r[b];
    }
    for (std::size_t b = a; b < d; ++b) {
      entries[a * d + b] = static_cast<double>(acc[b]);
      entries[b * d + a] = static_cast<double>(acc[b]);
    }
  }
  return SymMatrix(d, std::move(entries));
}

Vector matvec(const SymMatrix& a, const Vector& x) {
  require_same_size(a.dim(), x.size(), "matvec");
  const std::size_t d = a.dim();
  Vector out(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double* row = a.entries().data() + i * d;
    long double acc = 0.0L;
    for (std::size_t j = 0; j < d; ++j) acc += static_cast<long double>(row[j]) * x[j];
    out[i] = static_cast<double>(acc);
  }
  return out;
}

double rayleigh(const SymMatrix& a, const Vector& v) { return dot(v, matvec(a, v)); }

Vector multiply(const DataMatrix& y, const Vector& x) {
  require_same_size(y.cols(), x.size(), "Y x");
  Vector out(y.rows());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto r = y.row(i);
    long double acc = 0.0L;
    for (std::size_t j = 0; j < r.size(); ++j) acc += static_cast<long double>(r[j]) * x[j];
    out[i] = static_cast<double>(acc);
  }
  return out;
}

Vector multiply_transpose(const DataMatrix& y, const Vector& r) {
  require_same_size(y.rows(), r.size(), "Y^T r");
  std::vector<long double> acc(y.cols(), 0.0L);
  for (std::size_t i = 0; i < y.rows(); ++i) {
    const auto row = y.row(i);
    const long double ri = r[i];
    for (std::size_t j = 0; j < row.size(); ++j) acc[j] += ri * row[j];
  }
  Vector out(y.cols());
  for (std::size_t j = 0; j < acc.size(); ++j) out[j] = static_cast<double>(acc[j]);
  return out;
}

EigenSystem reference_eigh(const SymMatrix& a, const JacobiOptions& options) {
  const std::size_t d = a.dim();
  std::vector<double> m = a.entries();
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

  const double scale = a.frobenius_norm();
  auto off_norm = [&] {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i + 1; j < d; ++j) acc += 2.0L * m[i * d + j] * m[i * d + j];
    return static_cast<double>(std::sqrt(acc));
  };

  int sweep = 0;
  double off = off_norm();
  while (off > options.off_diagonal_tolerance * scale) {
    if (sweep == options.max_sweeps) {
      std::ostringstream msg;
      msg << "Jacobi did not converge after " << sweep << " sweeps (d=" << d
          << ", off-diagonal norm " << off << ", ||A||_F " << scale << ")";
      fail(ErrorKind::Numerical, msg.str());
    }
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = m[p * d + q];
        if (apq == 0.0) continue;
        const double app = m[p * d + p];
        const double aqq = m[q * d + q];
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          if (k == p || k == q) continue;
          const double akp = m[k * d + p];
          const double akq = m[k * d + q];
          const double new_kp = c * akp - s * akq;
          const double new_kq = s * akp + c * akq;
          m[k * d + p] = m[p * d + k] = new_kp;
          m[k * d + q] = m[q * d + k] = new_kq;
        }
        m[p * d + p] = app - t * apq;
        m[q * d + q] = aqq + t * apq;
        m[p * d + q] = m[q * d + p] = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v[k * d + p];
          const double vkq = v[k * d + q];
          v[k * d + p] = c * vkp - s * vkq;
          v[k * d + q] = s * vkp + c * vkq;
        }
      }
    }
    ++sweep;
    off = off_norm();
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return m[i * d + i] > m[j * d + j]; });

  EigenSystem out;
  out.values.reserve(d);
  out.vectors.reserve(d);
  for (std::size_t idx : order) {
    out.values.push_back(m[idx * d + idx]);
    Vector col(d);
    for (std::size_t k = 0; k < d; ++k) col[k] = v[k * d + idx];
    out.vectors.push_back(sign_normalize(normalize(col)));
  }
  return out;
}

double spectral_norm(const SymMatrix& a) {
  const EigenSystem es = reference_eigh(a);
  double best = 0.0;
  for (double x : es.values) best = std::max(best, std::abs(x));
  return best;
}

Vector sign_align(const Vector& v, const Vector& ref) {
  return dot(v, ref) < 0.0 ? -v : v;
}

Vector sign_normalize(const Vector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  return (!v.empty() && v[best] < 0.0) ? -v : v;
}

Vector normalize(const Vector& v) {
  const double n = norm2(v);
  if (!(n >= 1e-300)) {
    std::ostringstream msg;
    msg << "cannot normalise vector of norm " << n;
    fail(ErrorKind::Degenerate, msg.str());
  }
  return (1.0 / n) * v;
}

double sign_invariant_distance(const Vector& a, const Vector& b) {
  require_same_size(a.size(), b.size(), "sign_invariant_distance");
  long double minus = 0.0L;
  long double plus = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double dm = static_cast<long double>(a[i]) - b[i];
    const long double dp = static_cast<long double>(a[i]) + b[i];
    minus += dm * dm;
    plus += dp * dp;
  }
  return static_cast<double>(std::sqrt(std::min(minus, plus)));
}

}  // namespace pdpca
