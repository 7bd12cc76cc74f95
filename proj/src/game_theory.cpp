#include "pdpca/game_theory.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "pdpca/errors.hpp"
#include "pdpca/round_engine.hpp"

namespace pdpca {

namespace {

void check_dims(const Vector& v, std::span<const Vector> peers, const SymMatrix& sigma) {
  if (v.size() != sigma.dim()) fail(ErrorKind::Dimension, "utility: dimension mismatch");
  for (const Vector& p : peers)
    if (p.size() != sigma.dim()) fail(ErrorKind::Dimension, "utility: peer dimension mismatch");
}

// Unit vector at angle theta from v in a random tangent direction.
Vector perturb(const Vector& v, double theta, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Vector w(v.size());
  for (double& x : w) x = gauss(rng);
  w = add_scaled(w, -dot(w, v), v);
  w = normalize(w);
  return normalize(add_scaled(std::cos(theta) * v, std::sin(theta), w));
}

}  // namespace

double utility_U(const Vector& v, std::span<const Vector> peers, const SymMatrix& sigma) {
  check_dims(v, peers, sigma);
  const Vector sv = matvec(sigma, v);
  long double total = dot(v, sv);
  for (std::size_t i = 0; i < peers.size(); ++i) {
    const double r = rayleigh(sigma, peers[i]);
    if (!(r > 1e-12)) {
      std::ostringstream msg;
      msg << "utility_U: peer " << i + 1 << " has Rayleigh quotient " << r << " <= 1e-12";
      fail(ErrorKind::Degenerate, msg.str());
    }
    const long double cross = dot(peers[i], sv);
    total -= cross * cross / r;
  }
  return static_cast<double>(total);
}

double utility_V(const Vector& v, std::span<const Vector> peers, const SymMatrix& sigma) {
  check_dims(v, peers, sigma);
  long double total = rayleigh(sigma, v);
  for (const Vector& p : peers) {
    const long double overlap = dot(p, v);
    total -= static_cast<long double>(rayleigh(sigma, p)) * overlap * overlap;
  }
  return static_cast<double>(total);
}

std::vector<UtilityReport> nash_check(const SymMatrix& sigma, std::span<const Vector> candidates,
                                      const NashCheckOptions& options) {
  if (candidates.empty()) fail(ErrorKind::Config, "nash_check: no candidates");
  if (options.n_samples < 1) fail(ErrorKind::Config, "nash_check: n_samples must be >= 1");
  if (!(options.radius > 0.0)) fail(ErrorKind::Config, "nash_check: radius must be positive");
  if (!(options.min_angle >= 0.0 && options.min_angle <= options.radius))
    fail(ErrorKind::Config, "nash_check: min_angle must lie in [0, radius]");
  if (candidates.size() > sigma.dim()) fail(ErrorKind::Dimension, "nash_check: K exceeds dimension");

  const EigenSystem eig = reference_eigh(sigma);
  const std::size_t checked = std::min(sigma.dim(), candidates.size() + 1);
  for (std::size_t i = 0; i < checked; ++i) {
    if (!(eig.values[i] > 0.0)) fail(ErrorKind::Spectrum, "nash_check: top eigenvalues must be positive");
    if (i > 0 && !(eig.values[i] < eig.values[i - 1] - 1e-12 * eig.values[0]))
      fail(ErrorKind::Spectrum, "nash_check: top eigenvalues must be strictly decreasing");
  }

  std::vector<UtilityReport> out;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const Vector& v = candidates[k];
    const std::span<const Vector> peers = candidates.subspan(0, k);
    UtilityReport report;
    report.k = k + 1;
    report.n_samples = options.n_samples;
    report.radius = options.radius;
    report.min_angle = options.min_angle;
    report.value_at_candidate = utility_V(v, peers, sigma);
    report.max_perturbed_value = -std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(mix_seed(options.seed, k + 1));
    std::uniform_real_distribution<double> angle(options.min_angle, options.radius);
    for (std::size_t s = 0; s < options.n_samples; ++s) {
      const Vector p = perturb(v, angle(rng), rng);
      report.max_perturbed_value = std::max(report.max_perturbed_value, utility_V(p, peers, sigma));
    }
    report.strict = report.value_at_candidate - report.max_perturbed_value >=
                    1e-12 * std::abs(report.value_at_candidate);
    out.push_back(report);
  }
  return out;
}

}  // namespace pdpca
