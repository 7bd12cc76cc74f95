#include "pdpca/top1.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdpca/errors.hpp"

namespace pdpca {

namespace {

constexpr double kDegenerateNorm = 1e-300;

void require_unit(const Vector& v, const char* what) {
  if (std::abs(norm2(v) - 1.0) > 1e-6) {
    std::ostringstream msg;
    msg << what << ": initial vector is not unit norm (||v|| = " << norm2(v) << ")";
    fail(ErrorKind::Precondition, msg.str());
  }
}

Vector normalize_iterate(const Vector& x, int step) {
  const double n = norm2(x);
  if (!(n >= kDegenerateNorm)) {
    std::ostringstream msg;
    msg << "iterate " << step << " collapsed to norm " << n;
    fail(ErrorKind::Degenerate, msg.str());
  }
  return (1.0 / n) * x;
}

}  // namespace

void Top1Config::validate() const {
  if (steps < 1) fail(ErrorKind::Config, "Top1: steps T must be >= 1");
  if (method == Top1Method::Hebb && !(step_size > 0.0))
    fail(ErrorKind::Config, "Top1: Hebb step size must be positive");
}

Vector pow_iter(const SymMatrix& a, const Vector& v0, int steps, bool sign_align_output) {
  require_unit(v0, "pow_iter");
  Vector x = v0;
  for (int t = 0; t < steps; ++t) x = normalize_iterate(matvec(a, x), t + 1);
  return sign_align_output ? sign_align(x, v0) : x;
}

Vector hebb(const SymMatrix& a, const Vector& v0, int steps, double step_size,
            bool sign_align_output) {
  require_unit(v0, "hebb");
  Vector x = v0;
  for (int t = 0; t < steps; ++t) x = normalize_iterate(add_scaled(x, step_size, matvec(a, x)), t + 1);
  return sign_align_output ? sign_align(x, v0) : x;
}

Vector exact_top1(const SymMatrix& a, const Vector& v0) {
  const EigenSystem es = reference_eigh(a);
  std::size_t best = 0;
  for (std::size_t i = 1; i < es.size(); ++i)
    if (std::abs(es.values[i]) > std::abs(es.values[best])) best = i;
  return sign_align(es.vectors[best], v0);
}

Vector top1(const SymMatrix& a, const Vector& v0, const Top1Config& config) {
  config.validate();
  switch (config.method) {
    case Top1Method::PowerIteration:
      return pow_iter(a, v0, config.steps, config.sign_align_output);
    case Top1Method::Hebb:
      return hebb(a, v0, config.steps, config.step_size, config.sign_align_output);
    case Top1Method::Exact:
      return exact_top1(a, v0);
  }
  fail(ErrorKind::Config, "Top1: unknown method");
}

double cone_contraction_factor(double tangent_ratio, double min_cosine) {
  if (!(min_cosine > 0.0 && min_cosine < 1.0))
    fail(ErrorKind::Domain, "cone_contraction_factor: min_cosine must lie in (0, 1)");
  // sin(atan(r tan t) / 2) / sin(t / 2) increases in t, so the widest
  // admissible angle is the worst case.
  const double widest = std::acos(min_cosine);
  const double contracted = std::atan(tangent_ratio * std::tan(widest));
  return std::sin(0.5 * contracted) / std::sin(0.5 * widest);
}

ContractionEstimate contraction_estimate(const SymMatrix& a, const Top1Config& config,
                                         double min_cosine) {
  config.validate();
  const EigenSystem es = reference_eigh(a);

  auto leading_ratio = [](std::vector<double> magnitudes) {
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
    if (magnitudes.empty() || magnitudes.front() == 0.0)
      fail(ErrorKind::Spectrum, "contraction_estimate: zero matrix");
    if (magnitudes.size() == 1) return 0.0;
    if ((magnitudes[0] - magnitudes[1]) / magnitudes[0] < 1e-8) {
      std::ostringstream msg;
      msg << "contraction_estimate: leading magnitudes " << magnitudes[0] << " and " << magnitudes[1]
          << " are not separated";
      fail(ErrorKind::Spectrum, msg.str());
    }
    return magnitudes[1] / magnitudes[0];
  };

  std::vector<double> magnitudes;
  for (double v : es.values) magnitudes.push_back(std::abs(v));
  ContractionEstimate out;
  out.gap_ratio = leading_ratio(magnitudes);

  double per_step = out.gap_ratio;
  switch (config.method) {
    case Top1Method::PowerIteration:
      break;
    case Top1Method::Hebb: {
      std::vector<double> shifted;
      for (double v : es.values) shifted.push_back(std::abs(1.0 + config.step_size * v));
      per_step = leading_ratio(shifted);
      break;
    }
    case Top1Method::Exact:
      per_step = 0.0;
      break;
  }
  const double tangent_ratio = std::pow(per_step, config.steps);
  out.factor = std::clamp(cone_contraction_factor(tangent_ratio, min_cosine), 1e-12, 1.0 - 1e-12);
  return out;
}

}  // namespace pdpca
