#include "pdpca/stochastic.hpp"

#include <random>
#include <sstream>

#include "pdpca/errors.hpp"

namespace pdpca {

std::uint64_t batch_seed(std::uint64_t seed, const BatchKey& key) {
  return mix_seed(mix_seed(mix_seed(seed, key.worker), key.round), key.step);
}

RowSamplingProvider::RowSamplingProvider(DataMatrix data, std::size_t batch_size, std::uint64_t seed)
    : data_(std::move(data)), batch_size_(batch_size), seed_(seed) {
  if (data_.rows() == 0 || data_.cols() == 0) fail(ErrorKind::Config, "row sampler: empty data set");
  if (batch_size_ == 0) fail(ErrorKind::Config, "row sampler: batch size must be positive");
}

DataMatrix RowSamplingProvider::batch(const BatchKey& key) const {
  std::mt19937_64 rng(batch_seed(seed_, key));
  std::uniform_int_distribution<std::size_t> pick(0, data_.rows() - 1);
  DataMatrix out(batch_size_, data_.cols());
  for (std::size_t i = 0; i < batch_size_; ++i) {
    const auto src = data_.row(pick(rng));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

ReplayProvider::ReplayProvider(std::vector<DataMatrix> batches) : batches_(std::move(batches)) {
  if (batches_.empty()) fail(ErrorKind::Config, "replay provider: no batches");
  for (const auto& b : batches_)
    if (b.rows() != batches_.front().rows() || b.cols() != batches_.front().cols())
      fail(ErrorKind::Dimension, "replay provider: batches differ in shape");
}

DataMatrix ReplayProvider::batch(const BatchKey& key) const {
  if (key.global_step == 0 || key.global_step > batches_.size()) {
    std::ostringstream msg;
    msg << "stream exhausted at round " << key.round << ", step " << key.step << " (global step "
        << key.global_step << ", " << batches_.size() << " batches available)";
    fail(ErrorKind::Stream, msg.str());
  }
  return batches_[key.global_step - 1];
}

double StepSchedule::at(std::size_t global_step) const {
  if (decay == Decay::Constant) return eta0;
  const double s = global_step == 0 ? 0.0 : static_cast<double>(global_step - 1);
  return eta0 / (1.0 + s / horizon);
}

void StepSchedule::validate() const {
  if (!(eta0 > 0.0)) fail(ErrorKind::Config, "step schedule: eta0 must be positive");
  if (decay == Decay::InverseTime && !(horizon > 0.0))
    fail(ErrorKind::Config, "step schedule: horizon must be positive");
}

double est_lambda(const DataMatrix& batch, const Vector& v) {
  const Vector yv = multiply(batch, v);
  return dot(yv, yv);
}

Vector deflated_matvec(const DataMatrix& batch, std::span<const Vector> peers,
                       std::span<const double> lambdas, const Vector& x) {
  if (peers.size() != lambdas.size())
    fail(ErrorKind::Dimension, "deflated_matvec: peers and lambdas differ in length");
  Vector out = multiply_transpose(batch, multiply(batch, x));
  for (std::size_t i = 0; i < peers.size(); ++i) {
    if (peers[i].size() != x.size()) fail(ErrorKind::Dimension, "deflated_matvec: peer dimension mismatch");
    out = add_scaled(out, -lambdas[i] * dot(peers[i], x), peers[i]);
  }
  return out;
}

double estimate_top_eigenvalue(const BatchProvider& provider, std::uint64_t seed, int iterations) {
  const DataMatrix first = provider.batch(BatchKey{0, 0, 0, 0});
  Vector v = random_unit_vector(provider.dim(), mix_seed(seed, 0));
  for (int i = 0; i < iterations; ++i) v = normalize(multiply_transpose(first, multiply(first, v)));
  return est_lambda(first, v);
}

StepSchedule default_step_schedule(const BatchProvider& provider, std::size_t total_steps,
                                   std::uint64_t seed, double scale) {
  const double lambda = estimate_top_eigenvalue(provider, seed);
  if (!(lambda > 0.0)) fail(ErrorKind::Numerical, "step schedule: calibration batch has zero energy");
  StepSchedule s;
  s.eta0 = scale / lambda;
  s.decay = StepSchedule::Decay::InverseTime;
  s.horizon = std::max(1.0, static_cast<double>(total_steps) / 10.0);
  return s;
}

RunTrace stochastic_parallel_deflation(const BatchProvider& provider, const StochasticOptions& options) {
  options.schedule.validate();
  if (options.local_steps < 1) fail(ErrorKind::Config, "T must be >= 1");
  const RoundOptions round_options{provider.dim(), options.workers, options.rounds, options.seed,
                                   options.mode};
  const std::size_t steps = options.local_steps;
  const StepSchedule schedule = options.schedule;

  RunTrace trace = run_rounds(round_options, [&provider, steps, schedule](
                                                 std::size_t worker, std::size_t round,
                                                 std::span<const Vector> peers, const Vector& warm) {
    Vector v = warm;
    std::vector<double> lambdas(peers.size());
    for (std::size_t t = 1; t <= steps; ++t) {
      const BatchKey key{worker, round, t, (round - 1) * steps + t};
      DataMatrix batch;
      try {
        batch = provider.batch(key);
      } catch (const Error& e) {
        throw e.with_context("step " + std::to_string(t));
      }
      if (batch.cols() != v.size()) fail(ErrorKind::Dimension, "batch dimension mismatch");
      for (std::size_t i = 0; i < peers.size(); ++i) lambdas[i] = est_lambda(batch, peers[i]);
      const Vector g = deflated_matvec(batch, peers, lambdas, v);
      v = normalize(add_scaled(v, schedule.at(key.global_step), g));
    }
    return v;
  });
  trace.algorithm = "stochastic_parallel_deflation";
  trace.local_steps = steps;
  return trace;
}

}  // namespace pdpca
