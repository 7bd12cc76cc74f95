#pragma once

// Round-synchronous multi-worker skeleton shared by every engine.
//
// In round l (1-based) worker k (1-based) is active iff k <= l. An active
// worker reads the round-(l-1) broadcast of workers 1..k-1 and warm-starts
// from its own round-(l-1) vector; an inactive worker re-emits its frozen
// initial vector. All reads target the immutable previous-round snapshot,
// so worker updates inside a round are independent.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pdpca/linalg.hpp"

namespace pdpca {

enum class ExecutionMode { Sequential, Concurrent };

// splitmix64 of (seed, stream). Streams are independent of how many other
// streams exist.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Isotropic Gaussian sample, normalised.
Vector random_unit_vector(std::size_t dim, std::uint64_t seed);

// Worker k's initial vector is random_unit_vector(dim, mix_seed(seed, k)).
std::vector<Vector> initial_vectors(std::size_t dim, std::size_t workers, std::uint64_t seed);

// Calls fn(i) for i in [0, count). Concurrent mode uses a pool of threads;
// if several calls throw, the exception from the lowest index is rethrown.
void for_each_worker(ExecutionMode mode, std::size_t count,
                     const std::function<void(std::size_t)>& fn);

struct WorkerState {
  std::size_t index = 0;  // k, 1-based
  Vector v_init;
  Vector v_current;
  std::size_t rounds_active = 0;
};

struct RunTrace {
  std::string algorithm;
  std::size_t local_steps = 0;  // T
  std::size_t dim = 0;
  std::size_t workers = 0;
  std::vector<Vector> initial;
  std::vector<std::vector<Vector>> rounds;  // rounds[l-1][k-1]
  std::vector<std::vector<double>> errors;  // same shape once an oracle is attached
  bool errors_reliable = true;              // false when the oracle spectrum has ties

  std::size_t length() const noexcept { return rounds.size(); }
  bool has_errors() const noexcept { return !errors.empty(); }
  const Vector& vector(std::size_t round, std::size_t worker) const {
    return rounds.at(round - 1).at(worker - 1);
  }
  double error(std::size_t round, std::size_t worker) const {
    return errors.at(round - 1).at(worker - 1);
  }
  static bool active(std::size_t round, std::size_t worker) noexcept { return worker <= round; }
  std::vector<Vector> final_vectors() const;
};

// One active worker's computation for a round.
//   worker, round: 1-based
//   peers: round-(l-1) vectors of workers 1..worker-1
//   warm:  the worker's own round-(l-1) vector
using LocalUpdate = std::function<Vector(std::size_t worker, std::size_t round,
                                         std::span<const Vector> peers, const Vector& warm)>;

struct RoundOptions {
  std::size_t dim = 0;
  std::size_t workers = 0;
  std::size_t rounds = 0;
  std::uint64_t seed = 0;
  ExecutionMode mode = ExecutionMode::Sequential;
};

// Throws ErrorKind::Config when rounds < workers or workers > dim. Errors
// raised by `update` are rethrown with the worker and round attached.
RunTrace run_rounds(const RoundOptions& options, const LocalUpdate& update);

// Fills trace.errors with min over sign of ||v_{k,l} -/+ u_k||.
RunTrace attach_oracle(RunTrace trace, const EigenSystem& truth);

// CSV `round,worker,error,active` (plus `variant` when non-empty). The error
// column is blank without an oracle.
std::string trace_csv(const RunTrace& trace, const std::string& variant = {});

// Writes the CSV and a PDM1 file holding the final vectors as rows.
void export_trace(const RunTrace& trace, const std::filesystem::path& csv_path,
                  const std::filesystem::path& vectors_path, const std::string& variant = {});

}  // namespace pdpca
