#include "pdpca/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include "pdpca/deflation.hpp"
#include "pdpca/eigengame.hpp"
#include "pdpca/errors.hpp"
#include "pdpca/matrix_io.hpp"
#include "pdpca/metrics.hpp"
#include "pdpca/stochastic.hpp"
#include "pdpca/synthetic.hpp"

namespace pdpca {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string t = trim(text);
  T value{};
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(t.data(), end, value);
  if (ec != std::errc() || ptr != end || t.empty())
    fail(ErrorKind::Config, std::string(key) + ": cannot parse '" + t + "'");
  return value;
}

Top1Method parse_solver(std::string_view name) {
  if (name == "power") return Top1Method::PowerIteration;
  if (name == "hebb") return Top1Method::Hebb;
  if (name == "exact") return Top1Method::Exact;
  fail(ErrorKind::Config, "solver: unknown method '" + std::string(name) + "'");
}

struct Problem {
  bool oracle = false;
  bool has_sigma = false;
  SymMatrix sigma;
  EigenSystem eigen;
  DataMatrix factor;  // synthetic
  DataMatrix data;    // file
  std::size_t dim = 0;
};

bool needs_dense(Algorithm a) { return a != Algorithm::StochasticParallelDeflation; }

Problem build_problem(const ExperimentConfig& cfg) {
  Problem p;
  if (cfg.data.empty()) {
    const auto spectrum = parse_spectrum(cfg.spectrum, cfg.d);
    auto sample = random_covariance(spectrum, cfg.seed);
    p.oracle = true;
    p.has_sigma = true;
    p.sigma = std::move(sample.sigma);
    p.eigen = std::move(sample.eigen);
    p.factor = std::move(sample.factor);
    p.dim = cfg.d;
  } else {
    p.data = load_matrix(cfg.data);
    p.dim = p.data.cols();
    if (cfg.K > p.dim) fail(ErrorKind::Config, "K exceeds dimension");
    if (needs_dense(cfg.algorithm)) {
      p.sigma = covariance(p.data);
      p.has_sigma = true;
    }
  }
  return p;
}

Top1Config solver_config(const ExperimentConfig& cfg, const Problem& p) {
  Top1Config solver;
  solver.method = parse_solver(cfg.solver);
  solver.steps = static_cast<int>(cfg.T);
  solver.step_size = cfg.eta;
  if (solver.method == Top1Method::Hebb && !(solver.step_size > 0.0))
    solver.step_size = 1.0 / estimate_top_eigenvalue(p.sigma, cfg.seed);
  return solver;
}

RunTrace sequential_trace(const Problem& p, const ExperimentConfig& cfg, std::uint64_t seed) {
  const Top1Config solver = solver_config(cfg, p);
  const auto solved = sequential_deflation(p.sigma, cfg.K, solver, seed);
  RunTrace trace;
  trace.algorithm = "sequential_deflation";
  trace.local_steps = cfg.T;
  trace.dim = p.dim;
  trace.workers = cfg.K;
  trace.initial = initial_vectors(p.dim, cfg.K, seed);
  // stage l finishes component l; later components still sit at their start
  for (std::size_t l = 1; l <= cfg.K; ++l) {
    std::vector<Vector> row = trace.initial;
    for (std::size_t k = 0; k < l; ++k) row[k] = solved[k];
    trace.rounds.push_back(std::move(row));
  }
  return trace;
}

RunTrace run_trial(const Problem& p, const ExperimentConfig& cfg, std::uint64_t seed) {
  switch (cfg.algorithm) {
    case Algorithm::ParallelDeflation:
      return parallel_deflation(p.sigma, {cfg.K, cfg.L, solver_config(cfg, p), seed, cfg.mode});
    case Algorithm::SequentialDeflation:
      return sequential_trace(p, cfg, seed);
    case Algorithm::StochasticParallelDeflation: {
      std::unique_ptr<BatchProvider> provider;
      if (p.oracle)
        provider = std::make_unique<GaussianStream>(p.factor, cfg.batch, seed);
      else
        provider = std::make_unique<RowSamplingProvider>(p.data, cfg.batch, seed);
      StepSchedule schedule = default_step_schedule(*provider, cfg.L * cfg.T, seed);
      if (cfg.eta > 0.0) schedule.eta0 = cfg.eta;
      if (cfg.tau > 0.0) schedule.horizon = cfg.tau;
      if (cfg.decay == "constant") schedule.decay = StepSchedule::Decay::Constant;
      return stochastic_parallel_deflation(*provider, {cfg.K, cfg.L, cfg.T, schedule, seed, cfg.mode});
    }
    case Algorithm::EigenGameAlpha:
    case Algorithm::EigenGameMu: {
      const auto variant =
          cfg.algorithm == Algorithm::EigenGameAlpha ? EigenGameVariant::Alpha : EigenGameVariant::Mu;
      return run_eigengame(variant, p.sigma, {cfg.K, cfg.L, cfg.T, cfg.eta, seed, cfg.mode});
    }
  }
  fail(ErrorKind::Config, "algorithm: unsupported");
}

TrialMetrics score_trial(const Problem& p, const RunTrace& trace) {
  TrialMetrics m;
  for (std::size_t l = 1; l <= trace.length(); ++l) {
    const auto& vs = trace.rounds[l - 1];
    std::vector<double> per;
    long double disc = 0.0L;
    for (std::size_t k = 0; k < vs.size(); ++k) {
      double r;
      if (p.has_sigma) {
        r = rayleigh(p.sigma, vs[k]);
      } else {
        const Vector yv = multiply(p.data, vs[k]);
        r = dot(yv, yv);
      }
      per.push_back(r);
      disc += static_cast<long double>(r) / static_cast<long double>(k + 1);
    }
    m.rayleigh.push_back(std::move(per));
    m.discounted.push_back(static_cast<double>(disc));
    if (p.oracle) {
      const std::span<const Vector> truth(p.eigen.vectors.data(), vs.size());
      m.recovery.push_back(recovery_error(truth, vs));
    }
  }
  return m;
}

std::string file_stem(const ExperimentConfig& cfg) {
  return std::string(algorithm_name(cfg.algorithm)) + "_T" + std::to_string(cfg.T);
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::ParallelDeflation: return "parallel_deflation";
    case Algorithm::SequentialDeflation: return "sequential_deflation";
    case Algorithm::StochasticParallelDeflation: return "stochastic_parallel_deflation";
    case Algorithm::EigenGameAlpha: return "eigengame_alpha";
    case Algorithm::EigenGameMu: return "eigengame_mu";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (auto a : {Algorithm::ParallelDeflation, Algorithm::SequentialDeflation, Algorithm::StochasticParallelDeflation,
                 Algorithm::EigenGameAlpha, Algorithm::EigenGameMu})
    if (algorithm_name(a) == name) return a;
  fail(ErrorKind::Config, "algorithm: unknown '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  if (K < 1) fail(ErrorKind::Config, "K must be >= 1");
  if (data.empty() && d < 1) fail(ErrorKind::Config, "d must be >= 1");
  if (data.empty() && K > d) fail(ErrorKind::Config, "K exceeds dimension");
  if (L < K) fail(ErrorKind::Config, "L must be >= K");
  if (T < 1) fail(ErrorKind::Config, "T must be >= 1");
  if (trials < 1) fail(ErrorKind::Config, "trials must be >= 1");
  if (batch < 1) fail(ErrorKind::Config, "batch must be >= 1");
  if (!(eta >= 0.0)) fail(ErrorKind::Config, "eta must be >= 0");
  if (!(tau >= 0.0)) fail(ErrorKind::Config, "tau must be >= 0");
  if (decay != "inverse" && decay != "constant") fail(ErrorKind::Config, "decay must be inverse or constant");
  parse_solver(solver);
  if (data.empty()) parse_spectrum(spectrum, d);
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "algorithm") cfg.algorithm = parse_algorithm(value);
  else if (key == "spectrum") cfg.spectrum = value;
  else if (key == "d") cfg.d = parse_number<std::size_t>(key, value);
  else if (key == "data") cfg.data = value;
  else if (key == "K") cfg.K = parse_number<std::size_t>(key, value);
  else if (key == "L") cfg.L = parse_number<std::size_t>(key, value);
  else if (key == "T") cfg.T = parse_number<std::size_t>(key, value);
  else if (key == "solver") cfg.solver = value;
  else if (key == "eta") cfg.eta = parse_number<double>(key, value);
  else if (key == "decay") cfg.decay = value;
  else if (key == "tau") cfg.tau = parse_number<double>(key, value);
  else if (key == "batch") cfg.batch = parse_number<std::size_t>(key, value);
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "trials") cfg.trials = parse_number<std::size_t>(key, value);
  else if (key == "out") cfg.out = value;
  else if (key == "mode") {
    if (value == "sequential") cfg.mode = ExecutionMode::Sequential;
    else if (value == "concurrent") cfg.mode = ExecutionMode::Concurrent;
    else fail(ErrorKind::Config, "mode: expected sequential or concurrent");
  } else {
    fail(ErrorKind::Config, "unknown setting '" + std::string(key) + "'");
  }
}

void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::Config, path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    try {
      apply_setting(cfg, trim(std::string_view(t).substr(0, eq)), std::string_view(t).substr(eq + 1));
    } catch (const Error& e) {
      throw e.with_context(path.string() + ":" + std::to_string(lineno));
    }
  }
}

std::vector<double> parse_spectrum(std::string_view spec, std::size_t d) {
  if (spec == "powerlaw") return spectrum_powerlaw(d);
  if (spec == "expdecay") return spectrum_expdecay(d);
  if (spec.starts_with("geometric")) {
    double ratio = 0.5;
    if (spec.size() > 9) {
      if (spec[9] != ':') fail(ErrorKind::Config, "spectrum: expected geometric:<ratio>");
      ratio = parse_number<double>("spectrum", spec.substr(10));
    }
    return spectrum_geometric(d, ratio);
  }
  if (spec.starts_with("list:")) {
    std::vector<double> values;
    std::string_view rest = spec.substr(5);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      values.push_back(parse_number<double>("spectrum", rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (values.size() != d)
      fail(ErrorKind::Config, "spectrum: list has " + std::to_string(values.size()) + " values but d = " +
                                  std::to_string(d));
    validate_spectrum(values);
    return values;
  }
  fail(ErrorKind::Config, "spectrum: unknown family '" + std::string(spec) + "'");
}

double ExperimentResult::mean_final_error() const {
  if (final_errors.empty()) return std::numeric_limits<double>::quiet_NaN();
  long double s = 0.0L;
  for (double e : final_errors) s += e;
  return static_cast<double>(s / static_cast<long double>(final_errors.size()));
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Problem problem = build_problem(cfg);

  ExperimentResult result;
  result.algorithm = std::string(algorithm_name(cfg.algorithm));
  result.T = cfg.T;
  result.oracle = problem.oracle;
  result.traces.resize(cfg.trials);
  result.metrics.resize(cfg.trials);

  for_each_worker(cfg.mode, cfg.trials, [&](std::size_t i) {
    const std::uint64_t seed = cfg.seed + i;
    RunTrace trace;
    try {
      trace = run_trial(problem, cfg, seed);
    } catch (const Error& e) {
      throw e.with_context("trial " + std::to_string(i));
    }
    if (problem.oracle) trace = attach_oracle(std::move(trace), problem.eigen);
    result.metrics[i] = score_trial(problem, trace);
    result.traces[i] = std::move(trace);
  });

  for (const auto& m : result.metrics) {
    if (problem.oracle) result.final_errors.push_back(m.recovery.back());
    result.final_metrics.push_back(m.discounted.back());
  }

  const std::size_t rounds = result.traces.front().length();
  for (std::size_t l = 1; l <= rounds; ++l) {
    AggregateRow row;
    row.round = l;
    row.total_steps = l * cfg.T;
    row.min = std::numeric_limits<double>::infinity();
    row.max = -std::numeric_limits<double>::infinity();
    long double sum = 0.0L;
    for (const auto& m : result.metrics) {
      const double v = problem.oracle ? m.recovery[l - 1] : m.discounted[l - 1];
      sum += v;
      row.min = std::min(row.min, v);
      row.max = std::max(row.max, v);
    }
    row.mean = static_cast<double>(sum / static_cast<long double>(result.metrics.size()));
    result.aggregate.push_back(row);
  }

  if (!cfg.out.empty()) {
    ensure_dir(cfg.out);
    const std::string stem = file_stem(cfg);
    for (std::size_t i = 0; i < cfg.trials; ++i) {
      const auto path = cfg.out / (stem + "_trial" + std::to_string(i) + ".csv");
      write_file_atomic(path, trial_csv(result, i));
      result.files.push_back(path);
    }
    const auto agg = cfg.out / (stem + "_aggregate.csv");
    write_file_atomic(agg, aggregate_csv(result));
    result.files.push_back(agg);
  }
  return result;
}

std::string trial_csv(const ExperimentResult& result, std::size_t trial) {
  const RunTrace& trace = result.traces.at(trial);
  const TrialMetrics& m = result.metrics.at(trial);
  std::ostringstream out;
  out << std::setprecision(17) << "trial,algorithm,T,round,total_steps,worker,error,metric\n";
  for (std::size_t l = 1; l <= trace.length(); ++l) {
    const std::string prefix = std::to_string(trial) + ',' + result.algorithm + ',' + std::to_string(result.T) +
                               ',' + std::to_string(l) + ',' + std::to_string(l * result.T) + ',';
    out << prefix << 0 << ',';
    if (result.oracle) out << m.recovery[l - 1];
    out << ',' << m.discounted[l - 1] << '\n';
    for (std::size_t k = 1; k <= trace.workers; ++k) {
      out << prefix << k << ',';
      if (trace.has_errors()) out << trace.error(l, k);
      out << ',' << m.rayleigh[l - 1][k - 1] << '\n';
    }
  }
  return out.str();
}

std::string aggregate_csv(const ExperimentResult& result, bool header) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (header) out << "algorithm,T,round,total_steps,mean,min,max\n";
  for (const auto& r : result.aggregate)
    out << result.algorithm << ',' << result.T << ',' << r.round << ',' << r.total_steps << ',' << r.mean << ','
        << r.min << ',' << r.max << '\n';
  return out.str();
}

ComparisonResult run_comparison(const std::vector<ExperimentConfig>& cfgs) {
  if (cfgs.empty()) fail(ErrorKind::Config, "comparison: no configs");
  const auto& first = cfgs.front();
  for (const auto& c : cfgs)
    if (c.spectrum != first.spectrum || c.d != first.d || c.data != first.data || c.K != first.K ||
        c.seed != first.seed)
      fail(ErrorKind::Config, "comparison: mismatched sources");
  ComparisonResult out;
  out.csv = "algorithm,T,round,total_steps,mean,min,max\n";
  for (const auto& c : cfgs) {
    out.runs.push_back(run_experiment(c));
    out.csv += aggregate_csv(out.runs.back(), false);
  }
  if (!first.out.empty()) {
    ensure_dir(first.out);
    out.file = first.out / "comparison.csv";
    write_file_atomic(out.file, out.csv);
  }
  return out;
}

std::vector<ExperimentConfig> ablation_configs(const ExperimentConfig& base, const std::vector<std::size_t>& local_steps,
                                               std::size_t total_steps) {
  std::vector<ExperimentConfig> out;
  for (std::size_t t : local_steps) {
    if (t < 1 || total_steps % t != 0)
      fail(ErrorKind::Config, "ablation: T = " + std::to_string(t) + " does not divide the step budget");
    ExperimentConfig c = base;
    c.T = t;
    c.L = total_steps / t;
    out.push_back(c);
  }
  return out;
}

TheoryReport run_theory_report(const ExperimentConfig& input) {
  if (!input.data.empty()) fail(ErrorKind::Config, "theory report needs a synthetic source");
  ExperimentConfig cfg = input;
  cfg.algorithm = Algorithm::ParallelDeflation;
  const auto spectrum = parse_spectrum(cfg.spectrum, cfg.d);
  if (cfg.K > cfg.d) fail(ErrorKind::Config, "K exceeds dimension");
  Top1Config solver;
  solver.method = parse_solver(cfg.solver);
  solver.steps = static_cast<int>(cfg.T);
  solver.step_size = cfg.eta;

  TheoryReport report;
  const auto F = ideal_contractions(spectrum, cfg.K, solver);
  report.schedule = make_schedule(F, spectrum);
  const std::size_t required = static_cast<std::size_t>(report.schedule.s.back());
  if (cfg.L == 0) {
    cfg.L = std::max(required + 50, cfg.K);
  } else if (cfg.L < required) {
    fail(ErrorKind::Coverage, "theory report: L = " + std::to_string(cfg.L) + " is shorter than s_K; need L >= " +
                                  std::to_string(required));
  }
  cfg.validate();

  auto sample = random_covariance(spectrum, cfg.seed);
  report.trace = attach_oracle(parallel_deflation(sample.sigma, {cfg.K, cfg.L, solver, cfg.seed, cfg.mode}),
                               sample.eigen);
  report.bounds = check_bound(report.trace, report.schedule);

  if (!cfg.out.empty()) {
    ensure_dir(cfg.out);
    report.files = {cfg.out / "schedule.csv", cfg.out / "bounds.csv"};
    write_file_atomic(report.files[0], schedule_csv(report.schedule));
    write_file_atomic(report.files[1], bound_csv(report.bounds));
  }
  return report;
}

}  // namespace pdpca
