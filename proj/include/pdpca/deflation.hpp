#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdpca/linalg.hpp"
#include "pdpca/round_engine.hpp"
#include "pdpca/top1.hpp"

namespace pdpca {

// sigma - sum_i (v_i^T sigma v_i) v_i v_i^T, every Rayleigh quotient taken
// against the undeflated sigma. Each v must be unit norm to 1e-6.
SymMatrix deflate(const SymMatrix& sigma, std::span<const Vector> vs);

// Classical deflation: Sigma_{k+1} = Sigma_k - (v_k^T Sigma_k v_k) v_k v_k^T
// with v_k = Top1(Sigma_k, init_k). Initial vectors match the parallel
// engine for the same seed.
std::vector<Vector> sequential_deflation(const SymMatrix& sigma, std::size_t workers,
                                         const Top1Config& solver, std::uint64_t seed);

struct ParallelDeflationOptions {
  std::size_t workers = 1;  // K
  std::size_t rounds = 1;   // L, must be >= K
  Top1Config solver;
  std::uint64_t seed = 0;
  ExecutionMode mode = ExecutionMode::Sequential;
};

// Parallel deflation: in round l, worker k <= l deflates sigma with the
// round-(l-1) vectors of workers 1..k-1 and runs Top1 warm-started at its
// own round-(l-1) vector.
RunTrace parallel_deflation(const SymMatrix& sigma, const ParallelDeflationOptions& options);

}  // namespace pdpca
