#pragma once

// Synthetic spectra, rotated covariances and Gaussian sample streams.

#include <cstdint>
#include <span>
#include <vector>

#include "pdpca/linalg.hpp"
#include "pdpca/stochastic.hpp"

namespace pdpca {

// Eigenvalues, strictly positive and non-increasing.
using Spectrum = std::vector<double>;

void validate_spectrum(std::span<const double> values);

// lambda_k = 1 / sqrt(k)
Spectrum spectrum_powerlaw(std::size_t d);
// lambda_k = 1 / 1.1^k
Spectrum spectrum_expdecay(std::size_t d);
// lambda_k = ratio^(k-1)
Spectrum spectrum_geometric(std::size_t d, double ratio);

// Columns of a Haar-distributed orthogonal matrix: Gaussian entries,
// Gram-Schmidt with a positive-diagonal sign convention.
std::vector<Vector> haar_orthogonal(std::size_t d, std::uint64_t seed);

struct CovarianceSample {
  SymMatrix sigma;
  EigenSystem eigen;   // by construction
  DataMatrix factor;   // d x d, Q Lambda^(1/2); sigma = factor factor^T
};

CovarianceSample random_covariance(std::span<const double> spectrum, std::uint64_t seed);
// Fixed orthonormal basis (columns); identity basis gives a diagonal sigma.
CovarianceSample random_covariance(std::span<const double> spectrum, std::span<const Vector> basis);

// Rows y = A g with g ~ N(0, I_r) for a d x r factor A, so E[y y^T] = A A^T.
// A batch of n rows Y has E[Y^T Y] = n A A^T.
class GaussianStream final : public BatchProvider {
 public:
  GaussianStream(DataMatrix factor, std::size_t batch_size, std::uint64_t seed);
  std::size_t dim() const override { return factor_.rows(); }
  std::size_t batch_size() const override { return batch_size_; }
  DataMatrix batch(const BatchKey& key) const override;
  const DataMatrix& factor() const noexcept { return factor_; }

 private:
  DataMatrix factor_;
  std::size_t batch_size_;
  std::uint64_t seed_;
};

// Factor from the eigendecomposition of sigma. Throws ErrorKind::Spectrum if
// sigma has an eigenvalue below -1e-12 * ||sigma||.
GaussianStream gaussian_stream(const SymMatrix& sigma, std::size_t batch_size, std::uint64_t seed);
GaussianStream gaussian_stream(DataMatrix factor, std::size_t batch_size, std::uint64_t seed);

}  // namespace pdpca
