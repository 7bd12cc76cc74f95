#pragma once

// Experiment harness: builds a problem from a config, runs an engine over
// several seeded trials and writes per-trial and aggregate CSVs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pdpca/round_engine.hpp"
#include "pdpca/theory.hpp"

namespace pdpca {

enum class Algorithm {
  ParallelDeflation,
  SequentialDeflation,
  StochasticParallelDeflation,
  EigenGameAlpha,
  EigenGameMu,
};

std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);

struct ExperimentConfig {
  Algorithm algorithm = Algorithm::ParallelDeflation;
  // powerlaw | expdecay | geometric[:ratio] | list:v1,v2,...
  std::string spectrum = "powerlaw";
  std::size_t d = 50;
  std::filesystem::path data;  // non-empty selects the file source (PDM1 or CSV)
  std::size_t K = 5;
  std::size_t L = 100;
  std::size_t T = 1;
  std::string solver = "power";  // power | hebb | exact
  double eta = 0.0;              // 0 picks the engine default
  std::string decay = "inverse"; // inverse | constant (stochastic only)
  double tau = 0.0;              // 0 picks total steps / 10
  std::size_t batch = 256;
  std::uint64_t seed = 0;
  std::size_t trials = 1;
  std::filesystem::path out;     // empty: no files written
  ExecutionMode mode = ExecutionMode::Sequential;

  // Throws ErrorKind::Config naming the offending field.
  void validate() const;
};

// key=value assignment with the CLI flag names (algorithm, spectrum, d, K,
// L, T, solver, eta, decay, tau, batch, seed, trials, out, data, mode).
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
// Flat key=value file; blank lines and lines starting with '#' are skipped.
void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

std::vector<double> parse_spectrum(std::string_view spec, std::size_t d);

struct AggregateRow {
  std::size_t round = 0;
  std::size_t total_steps = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// Per-round scores for one trial.
struct TrialMetrics {
  std::vector<double> recovery;                // [l-1], empty without oracle
  std::vector<double> discounted;              // [l-1]
  std::vector<std::vector<double>> rayleigh;   // [l-1][k-1], v^T Sigma v
};

struct ExperimentResult {
  std::string algorithm;
  std::size_t T = 0;
  bool oracle = false;                  // aggregates are errors when true, discounted Rayleigh otherwise
  std::vector<RunTrace> traces;         // one per trial
  std::vector<TrialMetrics> metrics;    // one per trial
  std::vector<AggregateRow> aggregate;  // one per round
  std::vector<double> final_errors;     // per trial, empty without oracle
  std::vector<double> final_metrics;    // per trial
  std::vector<std::filesystem::path> files;

  double mean_final_error() const;
};

// Trial i uses seed + i for initial vectors and sampling; the synthetic
// covariance is drawn once from the base seed.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Per-trial CSV (trial,algorithm,T,round,total_steps,worker,error,metric).
// Worker 0 rows hold the recovery error and discounted Rayleigh score over
// all K components.
std::string trial_csv(const ExperimentResult& result, std::size_t trial);
// algorithm,T,round,total_steps,mean,min,max
std::string aggregate_csv(const ExperimentResult& result, bool header = true);

struct ComparisonResult {
  std::vector<ExperimentResult> runs;
  std::string csv;
  std::filesystem::path file;
};

// Configs must share the problem (spectrum, d, data, K, seed). Writes
// comparison.csv into the first config's output directory.
ComparisonResult run_comparison(const std::vector<ExperimentConfig>& cfgs);

// Copies of `base` with T from `local_steps` and L = total_steps / T.
std::vector<ExperimentConfig> ablation_configs(const ExperimentConfig& base, const std::vector<std::size_t>& local_steps,
                                               std::size_t total_steps);

struct TheoryReport {
  ConvergenceSchedule schedule;
  BoundReport bounds;
  RunTrace trace;
  std::vector<std::filesystem::path> files;
};

// Power-iteration parallel deflation with the schedule's F from the ideal
// deflated spectra. L = 0 picks s_K + 50; a shorter explicit L raises
// ErrorKind::Coverage with the required value.
TheoryReport run_theory_report(const ExperimentConfig& cfg);

}  // namespace pdpca
