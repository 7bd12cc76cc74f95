#pragma once

// EigenGame-alpha / EigenGame-mu baselines with T local steps per round on
// the same round skeleton as parallel deflation.

#include <cstdint>
#include <span>

#include "pdpca/linalg.hpp"
#include "pdpca/round_engine.hpp"

namespace pdpca {

enum class EigenGameVariant { Alpha, Mu };

const char* variant_name(EigenGameVariant variant);

// Sigma v - sum_i (v_i^T Sigma v / v_i^T Sigma v_i) Sigma v_i. Throws
// ErrorKind::Degenerate when a peer Rayleigh quotient is <= 1e-12.
Vector eigengame_alpha_grad(const SymMatrix& sigma, const Vector& v, std::span<const Vector> peers);

// Sigma v - sum_i (v_i^T Sigma v) v_i.
Vector eigengame_mu_grad(const SymMatrix& sigma, const Vector& v, std::span<const Vector> peers);

struct EigenGameOptions {
  std::size_t workers = 1;
  std::size_t rounds = 1;
  std::size_t local_steps = 1;
  double step_size = 0.0;  // <= 0 selects 0.1 / lambda_1 estimate
  std::uint64_t seed = 0;
  ExecutionMode mode = ExecutionMode::Sequential;
};

// Leading eigenvalue estimate from 30 power-iteration steps.
double estimate_top_eigenvalue(const SymMatrix& sigma, std::uint64_t seed);

// Each local step applies v <- normalize(v + eta g); no tangent projection.
RunTrace run_eigengame(EigenGameVariant variant, const SymMatrix& sigma, const EigenGameOptions& options);

}  // namespace pdpca
