#pragma once

#include <span>

#include "pdpca/linalg.hpp"

namespace pdpca {

// sqrt( (1/K) sum_k min_{s=+-1} ||u_k - s v_k||^2 ). Exactly invariant under
// sign flips of any est entry.
double recovery_error(std::span<const Vector> truth, std::span<const Vector> est);

// sum_k (1/k) v_k^T Sigma v_k.
double discounted_rayleigh(std::span<const Vector> est, const SymMatrix& sigma);

// Same score for Sigma = Y^T Y, computed as sum_k (1/k) ||Y v_k||^2.
double discounted_rayleigh(std::span<const Vector> est, const DataMatrix& data);

}  // namespace pdpca
