#include "pdpca/round_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "pdpca/errors.hpp"
#include "pdpca/matrix_io.hpp"

namespace pdpca {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vector random_unit_vector(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Vector v(dim);
  for (double& x : v) x = gauss(rng);
  return normalize(v);
}

std::vector<Vector> initial_vectors(std::size_t dim, std::size_t workers, std::uint64_t seed) {
  std::vector<Vector> out;
  out.reserve(workers);
  for (std::size_t k = 1; k <= workers; ++k) out.push_back(random_unit_vector(dim, mix_seed(seed, k)));
  return out;
}

void for_each_worker(ExecutionMode mode, std::size_t count,
                     const std::function<void(std::size_t)>& fn) {
  if (mode == ExecutionMode::Sequential || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t threads =
      std::min<std::size_t>(count, std::max(2u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = std::numeric_limits<std::size_t>::max();
  std::exception_ptr failure;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (i < failed_index) {
              failed_index = i;
              failure = std::current_exception();
            }
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<Vector> RunTrace::final_vectors() const {
  if (rounds.empty()) return initial;
  return rounds.back();
}

RunTrace run_rounds(const RoundOptions& options, const LocalUpdate& update) {
  if (options.workers < 1) fail(ErrorKind::Config, "K must be >= 1");
  if (options.workers > options.dim) fail(ErrorKind::Config, "K exceeds dimension");
  if (options.rounds < options.workers) fail(ErrorKind::Config, "L must be >= K");

  std::vector<WorkerState> states;
  states.reserve(options.workers);
  const auto init = initial_vectors(options.dim, options.workers, options.seed);
  for (std::size_t k = 1; k <= options.workers; ++k)
    states.push_back(WorkerState{k, init[k - 1], init[k - 1], 0});

  RunTrace trace;
  trace.dim = options.dim;
  trace.workers = options.workers;
  trace.initial = init;
  trace.rounds.reserve(options.rounds);

  std::vector<Vector> previous = init;
  for (std::size_t round = 1; round <= options.rounds; ++round) {
    std::vector<Vector> current(options.workers);
    for_each_worker(options.mode, options.workers, [&](std::size_t i) {
      WorkerState& state = states[i];
      if (!RunTrace::active(round, state.index)) {
        current[i] = state.v_init;
        return;
      }
      const std::span<const Vector> peers(previous.data(), i);
      try {
        current[i] = update(state.index, round, peers, previous[i]);
      } catch (const Error& e) {
        throw e.with_context("worker " + std::to_string(state.index) + ", round " +
                             std::to_string(round));
      }
      state.v_current = current[i];
      ++state.rounds_active;
    });
    trace.rounds.push_back(current);
    previous = std::move(current);
  }
  return trace;
}

RunTrace attach_oracle(RunTrace trace, const EigenSystem& truth) {
  if (trace.workers > truth.size())
    fail(ErrorKind::Dimension, "attach_oracle: K exceeds oracle size");
  if (!truth.vectors.empty() && truth.vectors.front().size() != trace.dim)
    fail(ErrorKind::Dimension, "attach_oracle: dimension mismatch");

  const std::size_t checked = std::min(truth.size(), trace.workers + 1);
  trace.errors_reliable = true;
  for (std::size_t i = 0; i + 1 < checked; ++i) {
    const double scale = std::max({std::abs(truth.values[i]), std::abs(truth.values[i + 1]), 1e-300});
    if (std::abs(truth.values[i] - truth.values[i + 1]) <= 1e-12 * scale) trace.errors_reliable = false;
  }

  trace.errors.assign(trace.length(), std::vector<double>(trace.workers));
  for (std::size_t l = 0; l < trace.length(); ++l)
    for (std::size_t k = 0; k < trace.workers; ++k)
      trace.errors[l][k] = sign_invariant_distance(trace.rounds[l][k], truth.vectors[k]);
  return trace;
}

std::string trace_csv(const RunTrace& trace, const std::string& variant) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "round,worker,error,active";
  if (!variant.empty()) out << ",variant";
  out << '\n';
  for (std::size_t l = 1; l <= trace.length(); ++l) {
    for (std::size_t k = 1; k <= trace.workers; ++k) {
      out << l << ',' << k << ',';
      if (trace.has_errors()) out << trace.error(l, k);
      out << ',' << (RunTrace::active(l, k) ? 1 : 0);
      if (!variant.empty()) out << ',' << variant;
      out << '\n';
    }
  }
  return out.str();
}

void export_trace(const RunTrace& trace, const std::filesystem::path& csv_path,
                  const std::filesystem::path& vectors_path, const std::string& variant) {
  write_file_atomic(csv_path, trace_csv(trace, variant));
  const auto finals = trace.final_vectors();
  DataMatrix m(finals.size(), trace.dim);
  for (std::size_t k = 0; k < finals.size(); ++k)
    std::copy(finals[k].begin(), finals[k].end(), m.row(k).begin());
  write_pdm1(vectors_path, m);
}

}  // namespace pdpca
