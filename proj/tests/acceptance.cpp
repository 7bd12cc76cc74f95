// Acceptance suite: one PASS/FAIL line per criterion, each with a wall-clock
// budget. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pdpca/deflation.hpp"
#include "pdpca/eigengame.hpp"
#include "pdpca/errors.hpp"
#include "pdpca/experiment.hpp"
#include "pdpca/game_theory.hpp"
#include "pdpca/metrics.hpp"
#include "pdpca/stochastic.hpp"
#include "pdpca/synthetic.hpp"
#include "pdpca/theory.hpp"

using namespace pdpca;

namespace {

struct Outcome {
  bool ok = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SymMatrix wishart(std::size_t n, std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  DataMatrix y(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) y(i, j) = g(rng);
  return covariance(y);
}

Outcome exact_fixpoint() {
  std::mt19937_64 rng(101);
  const SymMatrix s = wishart(100, 50, rng);
  const EigenSystem truth = reference_eigh(s);
  for (std::size_t i = 0; i + 1 < 11; ++i)
    if (!(truth.values[i] > truth.values[i + 1])) return {false, "sample spectrum has ties"};
  ParallelDeflationOptions opts{10, 10, {}, 7, ExecutionMode::Sequential};
  opts.solver.method = Top1Method::Exact;
  const RunTrace t = attach_oracle(parallel_deflation(s, opts), truth);
  double worst = 0.0;
  for (std::size_t k = 1; k <= 10; ++k)
    for (std::size_t l = k; l <= 10; ++l) worst = std::max(worst, t.error(l, k));
  return {worst <= 1e-8, fmt("max error from round k onward %.3e", worst)};
}

Outcome sequential_equivalence() {
  const auto cs = random_covariance(spectrum_geometric(64, 0.5), 202);
  Top1Config power;
  power.steps = 1000;
  const auto par = parallel_deflation(cs.sigma, {5, 5, power, 3, ExecutionMode::Sequential}).final_vectors();
  const auto seq = sequential_deflation(cs.sigma, 5, power, 3);
  double worst = 0.0;
  for (std::size_t k = 0; k < 5; ++k) worst = std::max(worst, sign_invariant_distance(par[k], seq[k]));
  return {worst <= 1e-6, fmt("max componentwise distance %.3e", worst)};
}

Outcome local_steps_ordering(const std::string& spectrum, double threshold) {
  ExperimentConfig cfg;
  cfg.spectrum = spectrum;
  cfg.d = 200;
  cfg.K = 10;
  cfg.trials = 5;
  cfg.seed = 1;
  cfg.T = 1;
  cfg.L = 400;
  const double e1 = run_experiment(cfg).mean_final_error();
  cfg.T = 5;
  cfg.L = 80;
  const double e5 = run_experiment(cfg).mean_final_error();
  return {e1 < threshold && e5 > e1, fmt("T=1 L=400: %.3e, T=5 L=80: %.3e", e1, e5)};
}

Outcome nash_suite() {
  std::mt19937_64 rng(505);
  std::vector<SymMatrix> sigmas{SymMatrix::diagonal({3, 2, 1})};
  for (int i = 0; i < 10; ++i) {
    const std::size_t d = 3 + i % 6;
    sigmas.push_back(oracle::compose(oracle::gapped_spectrum(d, 0.1, rng), oracle::random_basis(d, rng)));
  }
  std::size_t strict = 0, total = 0, controls_flagged = 0;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    const EigenSystem es = reference_eigh(sigmas[i]);
    std::vector<Vector> cand(es.vectors.begin(), es.vectors.begin() + 3);
    for (const auto& r : nash_check(sigmas[i], cand, {1000, 0.1, 1e-3, 40 + i})) {
      ++total;
      strict += r.strict ? 1 : 0;
    }
    std::swap(cand[0], cand[1]);
    const auto swapped = nash_check(sigmas[i], cand, {1000, 0.1, 1e-3, 80 + i});
    controls_flagged += swapped[0].strict ? 0 : 1;
  }
  return {strict == total && controls_flagged == sigmas.size(),
          fmt("strict %zu/%zu players, swapped controls flagged %zu/%zu", strict, total, controls_flagged,
              sigmas.size())};
}

Outcome schedule_bound() {
  ExperimentConfig cfg;
  cfg.spectrum = "geometric:0.5";
  cfg.d = 50;
  cfg.K = 3;
  cfg.T = 3;
  cfg.L = 0;
  cfg.seed = 606;
  const auto r = run_theory_report(cfg);
  double fmax = 0.0;
  for (double f : r.schedule.F) fmax = std::max(fmax, f);
  const bool lengths = r.trace.length() == static_cast<std::size_t>(r.schedule.s.back()) + 50;
  std::ostringstream s;
  for (int v : r.schedule.s) s << ' ' << v;
  return {fmax <= 0.3 && lengths && r.bounds.violations == 0 && !r.bounds.entries.empty(),
          fmt("max F %.4f, s =%s, %zu checks, %zu violations", fmax, s.str().c_str(), r.bounds.entries.size(),
              r.bounds.violations)};
}

Outcome contraction_property() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_excess = -1.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 2 + static_cast<std::size_t>(u(rng) * 31);
    const auto basis = oracle::random_basis(d, rng);
    const auto values = oracle::gapped_spectrum(d, 0.02 + 0.5 * u(rng), rng);
    const SymMatrix s = oracle::compose(values, basis);
    const double f = contraction_estimate(s).factor;
    const double c = 0.5 + 0.5 * u(rng);
    Vector w = oracle::random_unit(d, rng);
    w = normalize(add_scaled(w, -dot(w, basis[0]), basis[0]));
    const Vector x0 = normalize(add_scaled(c * basis[0], std::sqrt(std::max(0.0, 1 - c * c)), w));
    const double ratio = distance(pow_iter(s, x0, 1), basis[0]) / distance(x0, basis[0]);
    worst_excess = std::max(worst_excess, ratio - f);
  }
  return {worst_excess <= 1e-9, fmt("max (ratio - F) %.3e", worst_excess)};
}

Outcome lambert() {
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = -20.0 + (20.0 - 1.001) * i / 999.0;
    worst = std::max(worst, std::abs(lambert_w_m1(x * std::exp(x)) - x));
  }
  const bool cap = w_hat(std::exp(-1.0)) == 1.0;
  return {worst <= 1e-9 && cap, fmt("max round-trip error %.3e, w_hat(1/e) == 1: %s", worst, cap ? "yes" : "no")};
}

Outcome davis_kahan() {
  std::mt19937_64 rng(909);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.01, 0.999);
  double worst = -1.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 15;
    const auto values = oracle::gapped_spectrum(d, 0.05, rng);
    const SymMatrix m = oracle::compose(values, oracle::random_basis(d, rng));
    std::vector<double> h(d * d);
    for (double& x : h) x = g(rng);
    SymMatrix hm(d, h);
    hm.scale(u(rng) * 0.5 * (values[0] - values[1]) / spectral_norm(hm));
    const auto r = davis_kahan_gap_bound(m, hm);
    worst = std::max(worst, r.lhs - r.rhs);
  }
  return {worst <= 0.0, fmt("max (sin angle - bound) %.3e", worst)};
}

Outcome stochastic_desk_scale() {
  ExperimentConfig cfg;
  cfg.algorithm = Algorithm::StochasticParallelDeflation;
  cfg.spectrum = "powerlaw";
  cfg.d = 50;
  cfg.K = 5;
  cfg.batch = 256;
  cfg.decay = "inverse";
  cfg.T = 1;
  cfg.L = 2000;
  cfg.trials = 5;
  cfg.seed = 1010;
  const double e = run_experiment(cfg).mean_final_error();
  return {e < 0.3, fmt("mean final error %.4f over 5 seeds", e)};
}

Outcome matvec_equivalence() {
  std::mt19937_64 rng(1111);
  std::normal_distribution<double> g;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t d = 1 + trial % 64, n = 1 + (trial * 7) % 32, m = trial % std::min<std::size_t>(d, 8);
    DataMatrix y(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) y(i, j) = g(rng);
    std::vector<Vector> peers;
    std::vector<double> lambdas;
    for (std::size_t i = 0; i < m; ++i) {
      peers.push_back(oracle::random_unit(d, rng));
      lambdas.push_back(est_lambda(y, peers.back()));
    }
    const Vector x = oracle::random_unit(d, rng);
    const Vector diff = deflated_matvec(y, peers, lambdas, x) - matvec(deflate(covariance(y), peers), x);
    for (double v : diff) worst = std::max(worst, std::abs(v));
  }
  return {worst <= 1e-10, fmt("max entry difference %.3e", worst)};
}

Outcome utility_identities() {
  std::mt19937_64 rng(1212);
  double worst_v = 0.0, worst_u = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = 2 + trial % 12;
    const auto basis = oracle::random_basis(d, rng);
    const SymMatrix s = oracle::compose(oracle::gapped_spectrum(d, 0.05, rng), basis);
    std::vector<Vector> peers;
    for (std::size_t i = 0; i < trial % d; ++i) peers.push_back(oracle::random_unit(d, rng));
    const Vector v = oracle::random_unit(d, rng);
    worst_v = std::max(worst_v, std::abs(utility_V(v, peers, s) - rayleigh(deflate(s, peers), v)));
    const std::span<const Vector> exact(basis.data(), trial % d);
    worst_u = std::max(worst_u, std::abs(utility_U(v, exact, s) - utility_V(v, exact, s)));
  }
  return {worst_v <= 1e-10 && worst_u <= 1e-10,
          fmt("|V - v^T deflate v| %.3e, |U - V| at exact peers %.3e", worst_v, worst_u)};
}

Outcome metric_identities() {
  std::mt19937_64 rng(1313);
  std::normal_distribution<double> g;
  bool sign_exact = true;
  double worst_oracle = 0.0, worst_stream = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 20, K = 1 + trial % d;
    const auto values = oracle::gapped_spectrum(d, 0.05, rng);
    const auto basis = oracle::random_basis(d, rng);
    const SymMatrix s = oracle::compose(values, basis);
    std::vector<Vector> est;
    for (std::size_t k = 0; k < K; ++k) est.push_back(oracle::random_unit(d, rng));
    const std::vector<Vector> truth(basis.begin(), basis.begin() + K);
    auto flipped = est;
    for (std::size_t k = 0; k < K; ++k)
      if (g(rng) < 0) flipped[k] = -flipped[k];
    sign_exact = sign_exact && recovery_error(truth, est) == recovery_error(truth, flipped);

    double expect = 0.0;
    for (std::size_t k = 0; k < K; ++k) expect += values[k] / double(k + 1);
    worst_oracle = std::max(worst_oracle, std::abs(discounted_rayleigh(truth, s) - expect));

    DataMatrix y(1 + trial % 40, d);
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < d; ++j) y(i, j) = g(rng);
    worst_stream = std::max(worst_stream, std::abs(discounted_rayleigh(est, y) - discounted_rayleigh(est, covariance(y))));
  }
  return {sign_exact && worst_oracle <= 1e-10 && worst_stream <= 1e-10,
          fmt("sign flips exact: %s, oracle %.3e, streamed vs dense %.3e", sign_exact ? "yes" : "no", worst_oracle,
              worst_stream)};
}

Outcome determinism() {
  const auto cs = random_covariance(spectrum_powerlaw(40), 1414);
  std::size_t checked = 0, equal = 0;
  auto compare = [&](const RunTrace& a, const RunTrace& b) {
    ++checked;
    equal += a.rounds == b.rounds ? 1 : 0;
  };
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Top1Config power;
    power.steps = 2;
    ParallelDeflationOptions po{6, 12, power, seed, ExecutionMode::Sequential};
    const auto a = parallel_deflation(cs.sigma, po);
    po.mode = ExecutionMode::Concurrent;
    compare(a, parallel_deflation(cs.sigma, po));

    const GaussianStream stream(cs.factor, 64, seed);
    StochasticOptions so{6, 12, 2, default_step_schedule(stream, 24, seed), seed, ExecutionMode::Sequential};
    const auto b = stochastic_parallel_deflation(stream, so);
    so.mode = ExecutionMode::Concurrent;
    compare(b, stochastic_parallel_deflation(stream, so));

    for (auto variant : {EigenGameVariant::Alpha, EigenGameVariant::Mu}) {
      EigenGameOptions eo{6, 12, 2, 0.0, seed, ExecutionMode::Sequential};
      const auto c = run_eigengame(variant, cs.sigma, eo);
      eo.mode = ExecutionMode::Concurrent;
      compare(c, run_eigengame(variant, cs.sigma, eo));
    }
  }
  return {equal == checked, fmt("%zu/%zu concurrent traces bitwise equal", equal, checked)};
}

Outcome communication() {
  std::size_t matched = 0, total = 0;
  for (std::size_t K : {1u, 2u, 4u, 16u})
    for (double c : {0.0, 1.0, 2.5, 1e-3, 7.25})
      for (std::size_t d : {1u, 10u, 784u, 100000u}) {
        ++total;
        matched += comm_cost(K, c, d) == 0.5 * K * (K - 1) * c * d ? 1 : 0;
      }
  return {matched == total, fmt("%zu/%zu grid points exact", matched, total)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "exact-solver fixpoint", 1.0, exact_fixpoint},
      {2, "parallel matches sequential deflation", 5.0, sequential_equivalence},
      {3, "power-law spectrum, T=1 vs T=5 at equal steps", 60.0, [] { return local_steps_ordering("powerlaw", 0.1); }},
      {4, "exponential spectrum, T=1 vs T=5 at equal steps", 60.0, [] { return local_steps_ordering("expdecay", 0.15); }},
      {5, "Nash equilibrium at the eigenbasis", 10.0, nash_suite},
      {6, "convergence bound along the schedule", 120.0, schedule_bound},
      {7, "one-step contraction within F", 5.0, contraction_property},
      {8, "Lambert W lower branch", 1.0, lambert},
      {9, "Davis-Kahan angle bound", 5.0, davis_kahan},
      {10, "stochastic desk-scale recovery", 120.0, stochastic_desk_scale},
      {11, "matrix-free deflated matvec", 5.0, matvec_equivalence},
      {12, "utility identities", 5.0, utility_identities},
      {13, "metric identities", 5.0, metric_identities},
      {14, "concurrent determinism", 60.0, determinism},
      {15, "communication cost", 1.0, communication},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.ok && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s [%2d] %s: %s (%.2fs of %.0fs budget%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                o.detail.c_str(), secs, c.budget_seconds, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures;
}
