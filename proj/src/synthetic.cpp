#include "pdpca/synthetic.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "pdpca/errors.hpp"
#include "pdpca/round_engine.hpp"

namespace pdpca {

void validate_spectrum(std::span<const double> values) {
  if (values.empty()) fail(ErrorKind::Spectrum, "spectrum is empty");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      std::ostringstream msg;
      msg << "spectrum entry " << i + 1 << " is not strictly positive (" << values[i] << ")";
      fail(ErrorKind::Spectrum, msg.str());
    }
    if (i > 0 && values[i] > values[i - 1]) fail(ErrorKind::Spectrum, "spectrum is not non-increasing");
  }
}

Spectrum spectrum_powerlaw(std::size_t d) {
  Spectrum s(d);
  for (std::size_t k = 1; k <= d; ++k) s[k - 1] = 1.0 / std::sqrt(static_cast<double>(k));
  return s;
}

Spectrum spectrum_expdecay(std::size_t d) {
  Spectrum s(d);
  for (std::size_t k = 1; k <= d; ++k) s[k - 1] = 1.0 / std::pow(1.1, static_cast<double>(k));
  return s;
}

Spectrum spectrum_geometric(std::size_t d, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) fail(ErrorKind::Config, "geometric spectrum: ratio must lie in (0, 1]");
  Spectrum s(d);
  for (std::size_t k = 1; k <= d; ++k) s[k - 1] = std::pow(ratio, static_cast<double>(k - 1));
  return s;
}

std::vector<Vector> haar_orthogonal(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<Vector> q;
  q.reserve(d);
  for (std::size_t j = 0; j < d; ++j) {
    Vector v(d);
    for (double& x : v) x = gauss(rng);
    // two Gram-Schmidt passes keep the basis orthogonal to rounding level
    for (int pass = 0; pass < 2; ++pass)
      for (const Vector& prev : q) v = add_scaled(v, -dot(prev, v), prev);
    q.push_back(normalize(v));
  }
  return q;
}

CovarianceSample random_covariance(std::span<const double> spectrum, std::uint64_t seed) {
  const auto basis = haar_orthogonal(spectrum.size(), seed);
  return random_covariance(spectrum, basis);
}

CovarianceSample random_covariance(std::span<const double> spectrum, std::span<const Vector> basis) {
  validate_spectrum(spectrum);
  const std::size_t d = spectrum.size();
  if (basis.size() != d) fail(ErrorKind::Dimension, "random_covariance: basis size mismatch");
  for (const Vector& b : basis)
    if (b.size() != d) fail(ErrorKind::Dimension, "random_covariance: basis dimension mismatch");

  DataMatrix factor(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k) factor(i, k) = basis[k][i] * std::sqrt(spectrum[k]);

  std::vector<double> entries(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      long double acc = 0.0L;
      for (std::size_t k = 0; k < d; ++k)
        acc += static_cast<long double>(spectrum[k]) * basis[k][i] * basis[k][j];
      entries[i * d + j] = entries[j * d + i] = static_cast<double>(acc);
    }
  }

  CovarianceSample out;
  out.sigma = SymMatrix(d, std::move(entries));
  out.eigen.values.assign(spectrum.begin(), spectrum.end());
  for (const Vector& b : basis) out.eigen.vectors.push_back(sign_normalize(b));
  out.factor = std::move(factor);
  return out;
}

GaussianStream::GaussianStream(DataMatrix factor, std::size_t batch_size, std::uint64_t seed)
    : factor_(std::move(factor)), batch_size_(batch_size), seed_(seed) {
  if (factor_.rows() == 0 || factor_.cols() == 0) fail(ErrorKind::Config, "gaussian stream: empty factor");
  if (batch_size_ == 0) fail(ErrorKind::Config, "gaussian stream: batch size must be positive");
}

DataMatrix GaussianStream::batch(const BatchKey& key) const {
  const std::size_t d = factor_.rows();
  const std::size_t r = factor_.cols();
  std::mt19937_64 rng(batch_seed(seed_, key));
  std::normal_distribution<double> gauss;
  DataMatrix out(batch_size_, d);
  std::vector<double> g(r);
  for (std::size_t i = 0; i < batch_size_; ++i) {
    for (double& x : g) x = gauss(rng);
    auto row = out.row(i);
    for (std::size_t j = 0; j < d; ++j) {
      const auto a = factor_.row(j);
      double acc = 0.0;
      for (std::size_t c = 0; c < r; ++c) acc += a[c] * g[c];
      row[j] = acc;
    }
  }
  return out;
}

GaussianStream gaussian_stream(const SymMatrix& sigma, std::size_t batch_size, std::uint64_t seed) {
  const EigenSystem eig = reference_eigh(sigma);
  const std::size_t d = sigma.dim();
  const double scale = std::max(spectral_norm(sigma), 1e-300);
  DataMatrix factor(d, d);
  for (std::size_t k = 0; k < d; ++k) {
    double lambda = eig.values[k];
    if (lambda < -1e-12 * scale) {
      std::ostringstream msg;
      msg << "gaussian stream: covariance is not PSD (eigenvalue " << lambda << ")";
      fail(ErrorKind::Spectrum, msg.str());
    }
    const double root = std::sqrt(std::max(lambda, 0.0));
    for (std::size_t i = 0; i < d; ++i) factor(i, k) = eig.vectors[k][i] * root;
  }
  return GaussianStream(std::move(factor), batch_size, seed);
}

GaussianStream gaussian_stream(DataMatrix factor, std::size_t batch_size, std::uint64_t seed) {
  return GaussianStream(std::move(factor), batch_size, seed);
}

}  // namespace pdpca
