#pragma once

#include "pdpca/linalg.hpp"

namespace pdpca {

enum class Top1Method {
  PowerIteration,
  Hebb,
  Exact,  // oracle: top eigenvector from reference_eigh
};

struct Top1Config {
  Top1Method method = Top1Method::PowerIteration;
  int steps = 1;              // T
  double step_size = 0.0;     // eta, Hebb only
  bool sign_align_output = true;

  // Throws ErrorKind::Config on T < 1 or a non-positive Hebb step.
  void validate() const;
};

// Power iteration: x <- A x / ||A x||, T times.
Vector pow_iter(const SymMatrix& a, const Vector& v0, int steps, bool sign_align_output = true);

// Hebb's rule: x <- (x + eta A x) / ||x + eta A x||, T times.
Vector hebb(const SymMatrix& a, const Vector& v0, int steps, double step_size,
            bool sign_align_output = true);

// Eigenvector of the largest-magnitude eigenvalue, aligned with v0.
Vector exact_top1(const SymMatrix& a, const Vector& v0);

Vector top1(const SymMatrix& a, const Vector& v0, const Top1Config& config);

struct ContractionEstimate {
  // Distance contraction ||Top1(x0) - u|| <= factor * ||x0 - u|| valid for
  // every x0 with <x0, u> >= min_cosine.
  double factor = 0.0;
  // |lambda_2| / |lambda_1| of the input matrix.
  double gap_ratio = 0.0;
};

// Worst-case distance ratio on the cone <x0, u> >= min_cosine when the
// solver shrinks tan(angle to u) by `tangent_ratio`.
double cone_contraction_factor(double tangent_ratio, double min_cosine);

// Contraction factor of one Top1 call under `config`, clamped to
// [1e-12, 1 - 1e-12]. Throws ErrorKind::Spectrum when the two leading
// magnitudes are within a relative 1e-8.
ContractionEstimate contraction_estimate(const SymMatrix& a, const Top1Config& config = {},
                                         double min_cosine = 0.5);

}  // namespace pdpca
