#include "pdpca/deflation.hpp"

#include <cmath>
#include <sstream>

#include "pdpca/errors.hpp"

namespace pdpca {

namespace {

const char* solver_name(Top1Method method) {
  switch (method) {
    case Top1Method::PowerIteration: return "power";
    case Top1Method::Hebb: return "hebb";
    case Top1Method::Exact: return "exact";
  }
  return "?";
}

}  // namespace

SymMatrix deflate(const SymMatrix& sigma, std::span<const Vector> vs) {
  SymMatrix out = sigma;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const Vector& v = vs[i];
    if (v.size() != sigma.dim()) fail(ErrorKind::Dimension, "deflate: dimension mismatch");
    if (std::abs(norm2(v) - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "deflate: vector " << i + 1 << " is not unit norm (" << norm2(v) << ")";
      fail(ErrorKind::Precondition, msg.str());
    }
    out.add_rank_one(-rayleigh(sigma, v), v);
  }
  return out;
}

std::vector<Vector> sequential_deflation(const SymMatrix& sigma, std::size_t workers,
                                         const Top1Config& solver, std::uint64_t seed) {
  solver.validate();
  if (workers < 1) fail(ErrorKind::Config, "K must be >= 1");
  if (workers > sigma.dim()) fail(ErrorKind::Config, "K exceeds dimension");
  const auto init = initial_vectors(sigma.dim(), workers, seed);

  std::vector<Vector> out;
  out.reserve(workers);
  SymMatrix current = sigma;
  for (std::size_t k = 0; k < workers; ++k) {
    try {
      out.push_back(top1(current, init[k], solver));
    } catch (const Error& e) {
      throw e.with_context("worker " + std::to_string(k + 1));
    }
    if (k + 1 < workers) current.add_rank_one(-rayleigh(current, out.back()), out.back());
  }
  return out;
}

RunTrace parallel_deflation(const SymMatrix& sigma, const ParallelDeflationOptions& options) {
  options.solver.validate();
  RoundOptions round_options{sigma.dim(), options.workers, options.rounds, options.seed, options.mode};
  const Top1Config solver = options.solver;
  RunTrace trace = run_rounds(
      round_options, [&sigma, solver](std::size_t, std::size_t, std::span<const Vector> peers,
                                      const Vector& warm) {
        return top1(deflate(sigma, peers), warm, solver);
      });
  trace.algorithm = std::string("parallel_deflation/") + solver_name(solver.method);
  trace.local_steps = static_cast<std::size_t>(solver.steps);
  return trace;
}

}  // namespace pdpca
