#pragma once

// Streaming mini-batch parallel deflation with Hebb's rule. Nothing in this
// header materialises a d x d matrix; every product goes through Y or Y^T.

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pdpca/linalg.hpp"
#include "pdpca/round_engine.hpp"

namespace pdpca {

struct BatchKey {
  std::size_t worker = 0;       // 1-based; 0 is reserved for calibration draws
  std::size_t round = 0;        // l
  std::size_t step = 0;         // t within the round, 1-based
  std::size_t global_step = 0;  // (l - 1) * T + t
};

// Pull-based, replayable batch source. batch() must be a pure function of
// (provider state at construction, key) and safe to call concurrently.
class BatchProvider {
 public:
  virtual ~BatchProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::size_t batch_size() const = 0;
  // Throws ErrorKind::Stream when the key cannot be served.
  virtual DataMatrix batch(const BatchKey& key) const = 0;
};

// Serves the same matrix for every key.
class ConstantBatchProvider final : public BatchProvider {
 public:
  explicit ConstantBatchProvider(DataMatrix data) : data_(std::move(data)) {}
  std::size_t dim() const override { return data_.cols(); }
  std::size_t batch_size() const override { return data_.rows(); }
  DataMatrix batch(const BatchKey&) const override { return data_; }

 private:
  DataMatrix data_;
};

// Uniform with-replacement row sampling from an in-memory data set (e.g. a
// PDM1 or CSV file loaded with load_matrix).
class RowSamplingProvider final : public BatchProvider {
 public:
  RowSamplingProvider(DataMatrix data, std::size_t batch_size, std::uint64_t seed);
  std::size_t dim() const override { return data_.cols(); }
  std::size_t batch_size() const override { return batch_size_; }
  DataMatrix batch(const BatchKey& key) const override;

 private:
  DataMatrix data_;
  std::size_t batch_size_;
  std::uint64_t seed_;
};

// Finite list of batches indexed by global step and shared by all workers.
class ReplayProvider final : public BatchProvider {
 public:
  explicit ReplayProvider(std::vector<DataMatrix> batches);
  std::size_t dim() const override { return batches_.front().cols(); }
  std::size_t batch_size() const override { return batches_.front().rows(); }
  DataMatrix batch(const BatchKey& key) const override;

 private:
  std::vector<DataMatrix> batches_;
};

// Per-draw seed for a key; each (worker, round, step) gets its own stream.
std::uint64_t batch_seed(std::uint64_t seed, const BatchKey& key);

struct StepSchedule {
  enum class Decay { Constant, InverseTime };
  double eta0 = 0.0;
  Decay decay = Decay::Constant;
  double horizon = 1.0;  // tau for InverseTime

  // eta at 1-based global step s: eta0 / (1 + (s - 1) / tau).
  double at(std::size_t global_step) const;
  void validate() const;
};

// ||Y v||^2.
double est_lambda(const DataMatrix& batch, const Vector& v);

// Y^T (Y x) - sum_i lambda_i (v_i^T x) v_i.
Vector deflated_matvec(const DataMatrix& batch, std::span<const Vector> peers,
                       std::span<const double> lambdas, const Vector& x);

// Leading eigenvalue of Y^T Y for the calibration batch (key worker 0),
// by matrix-free power iteration.
double estimate_top_eigenvalue(const BatchProvider& provider, std::uint64_t seed, int iterations = 50);

// Inverse-time schedule with eta0 = scale / lambda_hat and tau = total / 10.
StepSchedule default_step_schedule(const BatchProvider& provider, std::size_t total_steps,
                                   std::uint64_t seed, double scale = 2.0);

struct StochasticOptions {
  std::size_t workers = 1;  // K
  std::size_t rounds = 1;   // L
  std::size_t local_steps = 1;  // T
  StepSchedule schedule;
  std::uint64_t seed = 0;
  ExecutionMode mode = ExecutionMode::Sequential;
};

// Every local step draws a fresh batch, re-estimates lambda_hat for each
// peer on it, and applies v <- normalize(v + eta_t g).
RunTrace stochastic_parallel_deflation(const BatchProvider& provider, const StochasticOptions& options);

}  // namespace pdpca
