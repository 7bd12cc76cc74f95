// pdpca: run parallel-deflation experiments and emit CSV traces.
//
//   pdpca run     [--config FILE] [--algorithm A] [--K 10] ...
//   pdpca compare --algorithms parallel_deflation,eigengame_mu --Ts 1,5 [--budget 400]
//   pdpca theory  --spectrum geometric:0.5 --d 50 --K 3 --T 3
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 I/O.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdpca/errors.hpp"
#include "pdpca/experiment.hpp"

namespace {

const std::vector<std::string> kSettings = {"algorithm", "spectrum", "d",     "K",    "L",      "T",
                                            "solver",    "eta",      "decay", "tau",  "batch",  "seed",
                                            "trials",    "out",      "data",  "mode"};

struct Flags {
  std::string config;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_setting_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config, "key=value config file");
  for (const auto& key : kSettings) flags.options[key] = cmd->add_option("--" + key, flags.values[key]);
}

// Config file first, then PDPCA_OUT_DIR, then explicit flags.
pdpca::ExperimentConfig resolve(const Flags& flags) {
  pdpca::ExperimentConfig cfg;
  cfg.out = "out";
  if (!flags.config.empty()) pdpca::load_config_file(cfg, flags.config);
  if (const char* env = std::getenv("PDPCA_OUT_DIR"); env && *env) cfg.out = env;
  for (const auto& key : kSettings)
    if (flags.options.at(key)->count() > 0) pdpca::apply_setting(cfg, key, flags.values.at(key));
  return cfg;
}

int exit_code(pdpca::ErrorKind kind) {
  using pdpca::ErrorKind;
  switch (kind) {
    case ErrorKind::Numerical:
    case ErrorKind::Degenerate:
    case ErrorKind::Capacity:
      return 3;
    case ErrorKind::Io:
    case ErrorKind::Stream:
      return 4;
    default:
      return 2;
  }
}

void print_run(const pdpca::ExperimentResult& r) {
  std::cout << r.algorithm << " T=" << r.T << ": " << r.traces.size() << " trial(s), " << r.aggregate.size()
            << " rounds";
  if (r.oracle) std::cout << ", mean final error " << r.mean_final_error();
  else std::cout << ", mean final metric " << r.aggregate.back().mean;
  std::cout << '\n';
  for (const auto& f : r.files) std::cout << "  wrote " << f.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel deflation PCA experiments"};
  app.require_subcommand(1);

  Flags run_flags, cmp_flags, theory_flags;
  auto* run = app.add_subcommand("run", "run one configuration over several trials");
  add_setting_flags(run, run_flags);

  auto* cmp = app.add_subcommand("compare", "run several algorithms / T values on one problem");
  add_setting_flags(cmp, cmp_flags);
  std::vector<std::string> algorithms;
  std::vector<std::size_t> local_steps;
  std::size_t budget = 0;
  cmp->add_option("--algorithms", algorithms, "algorithms to compare")->delimiter(',');
  cmp->add_option("--Ts", local_steps, "local step counts")->delimiter(',');
  cmp->add_option("--budget", budget, "fixed T*L budget; L = budget / T");

  auto* theory = app.add_subcommand("theory", "schedule and bound report");
  add_setting_flags(theory, theory_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      print_run(pdpca::run_experiment(resolve(run_flags)));
    } else if (cmp->parsed()) {
      const auto base = resolve(cmp_flags);
      if (algorithms.empty()) algorithms.emplace_back(pdpca::algorithm_name(base.algorithm));
      if (local_steps.empty()) local_steps.push_back(base.T);
      std::vector<pdpca::ExperimentConfig> cfgs;
      for (const auto& a : algorithms) {
        auto c = base;
        c.algorithm = pdpca::parse_algorithm(a);
        if (budget > 0) {
          for (auto& x : pdpca::ablation_configs(c, local_steps, budget)) cfgs.push_back(x);
        } else {
          for (auto t : local_steps) {
            c.T = t;
            cfgs.push_back(c);
          }
        }
      }
      const auto result = pdpca::run_comparison(cfgs);
      for (const auto& r : result.runs) print_run(r);
      if (!result.file.empty()) std::cout << "wrote " << result.file.string() << '\n';
    } else if (theory->parsed()) {
      auto cfg = resolve(theory_flags);
      if (theory_flags.options.at("L")->count() == 0) cfg.L = 0;
      const auto report = pdpca::run_theory_report(cfg);
      std::cout << "s =";
      for (int s : report.schedule.s) std::cout << ' ' << s;
      std::cout << "\nm =";
      for (double m : report.schedule.m) std::cout << ' ' << m;
      std::cout << "\nrounds " << report.trace.length() << ", bound checks " << report.bounds.entries.size()
                << ", violations " << report.bounds.violations << '\n';
      for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
      return report.bounds.violations == 0 ? 0 : 3;
    }
  } catch (const pdpca::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
