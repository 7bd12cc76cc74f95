#include "pdpca/eigengame.hpp"

#include <sstream>
#include <vector>

#include "pdpca/errors.hpp"

namespace pdpca {

namespace {

void check_dims(const SymMatrix& sigma, const Vector& v, std::span<const Vector> peers) {
  if (v.size() != sigma.dim()) fail(ErrorKind::Dimension, "eigengame: dimension mismatch");
  for (const Vector& p : peers)
    if (p.size() != sigma.dim()) fail(ErrorKind::Dimension, "eigengame: peer dimension mismatch");
}

// Per-round peer data: Sigma v_i and v_i^T Sigma v_i.
struct PeerProducts {
  std::vector<Vector> sigma_v;
  std::vector<double> rayleigh;
};

PeerProducts peer_products(const SymMatrix& sigma, std::span<const Vector> peers) {
  PeerProducts out;
  for (std::size_t i = 0; i < peers.size(); ++i) {
    out.sigma_v.push_back(matvec(sigma, peers[i]));
    const double r = dot(peers[i], out.sigma_v.back());
    if (!(r > 1e-12)) {
      std::ostringstream msg;
      msg << "eigengame: peer " << i + 1 << " has Rayleigh quotient " << r << " <= 1e-12";
      fail(ErrorKind::Degenerate, msg.str());
    }
    out.rayleigh.push_back(r);
  }
  return out;
}

Vector alpha_step(const Vector& sigma_x, const PeerProducts& pp, const Vector& x) {
  Vector g = sigma_x;
  for (std::size_t i = 0; i < pp.sigma_v.size(); ++i)
    g = add_scaled(g, -dot(pp.sigma_v[i], x) / pp.rayleigh[i], pp.sigma_v[i]);
  return g;
}

Vector mu_step(const Vector& sigma_x, std::span<const Vector> peers) {
  Vector g = sigma_x;
  // v_i^T Sigma x taken as (Sigma x)^T v_i; symmetric sigma makes them equal
  for (const Vector& p : peers) g = add_scaled(g, -dot(p, sigma_x), p);
  return g;
}

}  // namespace

const char* variant_name(EigenGameVariant variant) {
  return variant == EigenGameVariant::Alpha ? "eigengame_alpha" : "eigengame_mu";
}

Vector eigengame_alpha_grad(const SymMatrix& sigma, const Vector& v, std::span<const Vector> peers) {
  check_dims(sigma, v, peers);
  return alpha_step(matvec(sigma, v), peer_products(sigma, peers), v);
}

Vector eigengame_mu_grad(const SymMatrix& sigma, const Vector& v, std::span<const Vector> peers) {
  check_dims(sigma, v, peers);
  return mu_step(matvec(sigma, v), peers);
}

double estimate_top_eigenvalue(const SymMatrix& sigma, std::uint64_t seed) {
  Vector v = random_unit_vector(sigma.dim(), mix_seed(seed, 0));
  for (int i = 0; i < 30; ++i) v = normalize(matvec(sigma, v));
  return rayleigh(sigma, v);
}

RunTrace run_eigengame(EigenGameVariant variant, const SymMatrix& sigma, const EigenGameOptions& options) {
  if (options.local_steps < 1) fail(ErrorKind::Config, "T must be >= 1");
  double eta = options.step_size;
  if (!(eta > 0.0)) {
    const double lambda = estimate_top_eigenvalue(sigma, options.seed);
    if (!(lambda > 0.0)) fail(ErrorKind::Spectrum, "eigengame: leading eigenvalue is not positive");
    eta = 0.1 / lambda;
  }
  const std::size_t steps = options.local_steps;
  const RoundOptions round_options{sigma.dim(), options.workers, options.rounds, options.seed, options.mode};

  RunTrace trace = run_rounds(round_options, [&sigma, variant, steps, eta](
                                                 std::size_t, std::size_t, std::span<const Vector> peers,
                                                 const Vector& warm) {
    PeerProducts pp;
    if (variant == EigenGameVariant::Alpha) pp = peer_products(sigma, peers);
    Vector v = warm;
    for (std::size_t t = 0; t < steps; ++t) {
      const Vector sv = matvec(sigma, v);
      const Vector g = variant == EigenGameVariant::Alpha ? alpha_step(sv, pp, v) : mu_step(sv, peers);
      v = normalize(add_scaled(v, eta, g));
    }
    return v;
  });
  trace.algorithm = variant_name(variant);
  trace.local_steps = steps;
  return trace;
}

}  // namespace pdpca
