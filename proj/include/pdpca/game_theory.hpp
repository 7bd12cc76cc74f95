#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdpca/linalg.hpp"

namespace pdpca {

// EigenGame payoff: v^T S v - sum_i (v_i^T S v)^2 / (v_i^T S v_i).
double utility_U(const Vector& v, std::span<const Vector> peers, const SymMatrix& sigma);

// Deflation payoff: v^T S v - sum_i (v_i^T S v_i) (v_i^T v)^2,
// equal to v^T deflate(S, peers) v.
double utility_V(const Vector& v, std::span<const Vector> peers, const SymMatrix& sigma);

struct UtilityReport {
  std::size_t k = 0;  // 1-based player index
  double value_at_candidate = 0.0;
  double max_perturbed_value = 0.0;
  std::size_t n_samples = 0;
  double radius = 0.0;
  double min_angle = 0.0;
  // value_at_candidate - max_perturbed_value >= 1e-12 * |value_at_candidate|
  bool strict = false;
};

struct NashCheckOptions {
  std::size_t n_samples = 1000;
  double radius = 0.1;      // largest geodesic angle
  double min_angle = 1e-3;  // smallest geodesic angle
  std::uint64_t seed = 0;
};

// For each player k, evaluates utility_V at sampled points of the sphere at
// angle in [min_angle, radius] from candidate k, with peers 1..k-1 held at
// their candidates. Throws ErrorKind::Spectrum unless the top K+1
// eigenvalues of sigma are positive and strictly decreasing.
std::vector<UtilityReport> nash_check(const SymMatrix& sigma, std::span<const Vector> candidates,
                                      const NashCheckOptions& options = {});

}  // namespace pdpca
