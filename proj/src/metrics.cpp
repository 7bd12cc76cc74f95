#include "pdpca/metrics.hpp"

#include <cmath>

#include "pdpca/errors.hpp"

namespace pdpca {

double recovery_error(std::span<const Vector> truth, std::span<const Vector> est) {
  if (truth.size() != est.size()) fail(ErrorKind::Dimension, "recovery_error: K mismatch");
  if (truth.empty()) fail(ErrorKind::Dimension, "recovery_error: no components");
  long double total = 0.0L;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const Vector& u = truth[k];
    const Vector& v = est[k];
    if (u.size() != v.size()) fail(ErrorKind::Dimension, "recovery_error: dimension mismatch");
    long double minus = 0.0L, plus = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const long double a = static_cast<long double>(u[i]) - v[i];
      const long double b = static_cast<long double>(u[i]) + v[i];
      minus += a * a;
      plus += b * b;
    }
    total += std::min(minus, plus);
  }
  return static_cast<double>(std::sqrt(total / static_cast<long double>(truth.size())));
}

double discounted_rayleigh(std::span<const Vector> est, const SymMatrix& sigma) {
  long double total = 0.0L;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est[k].size() != sigma.dim()) fail(ErrorKind::Dimension, "discounted_rayleigh: dimension mismatch");
    total += static_cast<long double>(rayleigh(sigma, est[k])) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(total);
}

double discounted_rayleigh(std::span<const Vector> est, const DataMatrix& data) {
  long double total = 0.0L;
  for (std::size_t k = 0; k < est.size(); ++k) {
    if (est[k].size() != data.cols()) fail(ErrorKind::Dimension, "discounted_rayleigh: dimension mismatch");
    const Vector yv = multiply(data, est[k]);
    total += static_cast<long double>(dot(yv, yv)) / static_cast<long double>(k + 1);
  }
  return static_cast<double>(total);
}

}  // namespace pdpca
