#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "pdpca/deflation.hpp"
#include "pdpca/eigengame.hpp"
#include "pdpca/errors.hpp"
#include "pdpca/experiment.hpp"
#include "pdpca/game_theory.hpp"
#include "pdpca/metrics.hpp"
#include "pdpca/stochastic.hpp"
#include "pdpca/synthetic.hpp"
#include "pdpca/theory.hpp"

namespace py = pybind11;
using namespace pdpca;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

DataMatrix to_data(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array");
  const auto r = static_cast<std::size_t>(a.shape(0)), c = static_cast<std::size_t>(a.shape(1));
  return DataMatrix(r, c, std::vector<double>(a.data(), a.data() + r * c));
}

SymMatrix to_sym(const Array& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw py::value_error("expected a square 2-d array");
  const auto d = static_cast<std::size_t>(a.shape(0));
  return SymMatrix(d, std::vector<double>(a.data(), a.data() + d * d));
}

Vector to_vec(const Array& a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
  return Vector(std::vector<double>(a.data(), a.data() + a.shape(0)));
}

// Rows of a 2-d array as vectors.
std::vector<Vector> to_rows(const Array& a) {
  if (a.ndim() == 1 && a.shape(0) == 0) return {};
  if (a.ndim() != 2) throw py::value_error("expected a 2-d array of row vectors");
  std::vector<Vector> out;
  const auto c = static_cast<std::size_t>(a.shape(1));
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    out.emplace_back(std::vector<double>(a.data() + i * c, a.data() + (i + 1) * c));
  return out;
}

py::array_t<double> from_vec(const Vector& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::array_t<double> from_rows(const std::vector<Vector>& rows, std::size_t dim) {
  py::array_t<double> out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(dim)});
  double* p = out.mutable_data();
  for (const auto& r : rows) p = std::copy(r.begin(), r.end(), p);
  return out;
}

py::array_t<double> from_sym(const SymMatrix& s) {
  py::array_t<double> out({static_cast<py::ssize_t>(s.dim()), static_cast<py::ssize_t>(s.dim())});
  std::copy(s.entries().begin(), s.entries().end(), out.mutable_data());
  return out;
}

py::dict trace_dict(const RunTrace& t) {
  py::array_t<double> rounds({static_cast<py::ssize_t>(t.length()), static_cast<py::ssize_t>(t.workers),
                              static_cast<py::ssize_t>(t.dim)});
  double* p = rounds.mutable_data();
  for (const auto& round : t.rounds)
    for (const auto& v : round) p = std::copy(v.begin(), v.end(), p);
  py::dict d;
  d["algorithm"] = t.algorithm;
  d["local_steps"] = t.local_steps;
  d["rounds"] = rounds;
  d["initial"] = from_rows(t.initial, t.dim);
  d["final"] = from_rows(t.final_vectors(), t.dim);
  if (t.has_errors()) {
    d["errors"] = t.errors;
    d["errors_reliable"] = t.errors_reliable;
  }
  return d;
}

Top1Config solver_config(const std::string& solver, int steps, double eta) {
  Top1Config c;
  if (solver == "power") c.method = Top1Method::PowerIteration;
  else if (solver == "hebb") c.method = Top1Method::Hebb;
  else if (solver == "exact") c.method = Top1Method::Exact;
  else throw py::value_error("solver must be power, hebb or exact");
  c.steps = steps;
  c.step_size = eta;
  return c;
}

ExecutionMode mode_of(bool concurrent) { return concurrent ? ExecutionMode::Concurrent : ExecutionMode::Sequential; }

RunTrace maybe_oracle(RunTrace t, const std::optional<Array>& truth) {
  if (!truth) return t;
  EigenSystem es;
  es.vectors = to_rows(*truth);
  es.values.assign(es.vectors.size(), 0.0);
  // values only feed the tie check; strictly decreasing placeholders
  for (std::size_t i = 0; i < es.values.size(); ++i) es.values[i] = static_cast<double>(es.values.size() - i);
  return attach_oracle(std::move(t), es);
}

}  // namespace

PYBIND11_MODULE(_pdpca, m) {
  m.doc() = "Parallel deflation PCA";

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string msg = "[" + std::string(to_string(e.kind())) + "] " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  m.def("reference_eigh", [](const Array& a) {
    const auto es = reference_eigh(to_sym(a));
    return py::make_tuple(es.values, from_rows(es.vectors, es.size()));
  });
  m.def("deflate", [](const Array& sigma, const Array& vs) { return from_sym(deflate(to_sym(sigma), to_rows(vs))); });
  m.def("top1", [](const Array& a, const Array& v0, const std::string& solver, int steps, double eta) {
    return from_vec(top1(to_sym(a), to_vec(v0), solver_config(solver, steps, eta)));
  }, py::arg("a"), py::arg("v0"), py::arg("solver") = "power", py::arg("steps") = 1, py::arg("eta") = 0.0);
  m.def("contraction_estimate", [](const Array& a, const std::string& solver, int steps, double eta) {
    const auto e = contraction_estimate(to_sym(a), solver_config(solver, steps, eta));
    return py::make_tuple(e.factor, e.gap_ratio);
  }, py::arg("a"), py::arg("solver") = "power", py::arg("steps") = 1, py::arg("eta") = 0.0);

  m.def("parallel_deflation",
        [](const Array& sigma, std::size_t K, std::size_t L, int T, const std::string& solver, double eta,
           std::uint64_t seed, bool concurrent, std::optional<Array> truth) {
          const auto t = parallel_deflation(to_sym(sigma), {K, L, solver_config(solver, T, eta), seed, mode_of(concurrent)});
          return trace_dict(maybe_oracle(t, truth));
        },
        py::arg("sigma"), py::arg("K"), py::arg("L"), py::arg("T") = 1, py::arg("solver") = "power",
        py::arg("eta") = 0.0, py::arg("seed") = 0, py::arg("concurrent") = false, py::arg("truth") = py::none());
  m.def("sequential_deflation",
        [](const Array& sigma, std::size_t K, int T, const std::string& solver, double eta, std::uint64_t seed) {
          const SymMatrix s = to_sym(sigma);
          return from_rows(sequential_deflation(s, K, solver_config(solver, T, eta), seed), s.dim());
        },
        py::arg("sigma"), py::arg("K"), py::arg("T") = 1, py::arg("solver") = "power", py::arg("eta") = 0.0,
        py::arg("seed") = 0);

  m.def("est_lambda", [](const Array& y, const Array& v) { return est_lambda(to_data(y), to_vec(v)); });
  m.def("deflated_matvec", [](const Array& y, const Array& peers, const std::vector<double>& lambdas, const Array& x) {
    return from_vec(deflated_matvec(to_data(y), to_rows(peers), lambdas, to_vec(x)));
  });
  m.def("stochastic_parallel_deflation",
        [](const Array& source, std::string kind, std::size_t K, std::size_t L, std::size_t T, std::size_t batch,
           double eta0, double tau, std::uint64_t seed, bool concurrent, std::optional<Array> truth) {
          std::unique_ptr<BatchProvider> provider;
          if (kind == "gaussian") provider = std::make_unique<GaussianStream>(to_data(source), batch, seed);
          else if (kind == "rows") provider = std::make_unique<RowSamplingProvider>(to_data(source), batch, seed);
          else if (kind == "full") provider = std::make_unique<ConstantBatchProvider>(to_data(source));
          else throw py::value_error("kind must be gaussian, rows or full");
          StepSchedule sched = default_step_schedule(*provider, L * T, seed);
          if (eta0 > 0) sched.eta0 = eta0;
          if (tau > 0) sched.horizon = tau;
          const auto t = stochastic_parallel_deflation(*provider, {K, L, T, sched, seed, mode_of(concurrent)});
          return trace_dict(maybe_oracle(t, truth));
        },
        py::arg("source"), py::arg("kind") = "gaussian", py::arg("K") = 1, py::arg("L") = 1, py::arg("T") = 1,
        py::arg("batch") = 256, py::arg("eta0") = 0.0, py::arg("tau") = 0.0, py::arg("seed") = 0,
        py::arg("concurrent") = false, py::arg("truth") = py::none());

  m.def("eigengame_alpha_grad", [](const Array& s, const Array& v, const Array& peers) {
    return from_vec(eigengame_alpha_grad(to_sym(s), to_vec(v), to_rows(peers)));
  });
  m.def("eigengame_mu_grad", [](const Array& s, const Array& v, const Array& peers) {
    return from_vec(eigengame_mu_grad(to_sym(s), to_vec(v), to_rows(peers)));
  });
  m.def("run_eigengame",
        [](const std::string& variant, const Array& sigma, std::size_t K, std::size_t L, std::size_t T, double eta,
           std::uint64_t seed, bool concurrent, std::optional<Array> truth) {
          EigenGameVariant v;
          if (variant == "alpha") v = EigenGameVariant::Alpha;
          else if (variant == "mu") v = EigenGameVariant::Mu;
          else throw py::value_error("variant must be alpha or mu");
          const auto t = run_eigengame(v, to_sym(sigma), {K, L, T, eta, seed, mode_of(concurrent)});
          return trace_dict(maybe_oracle(t, truth));
        },
        py::arg("variant"), py::arg("sigma"), py::arg("K"), py::arg("L"), py::arg("T") = 1, py::arg("eta") = 0.0,
        py::arg("seed") = 0, py::arg("concurrent") = false, py::arg("truth") = py::none());

  m.def("utility_U", [](const Array& v, const Array& peers, const Array& s) {
    return utility_U(to_vec(v), to_rows(peers), to_sym(s));
  });
  m.def("utility_V", [](const Array& v, const Array& peers, const Array& s) {
    return utility_V(to_vec(v), to_rows(peers), to_sym(s));
  });
  m.def("nash_check",
        [](const Array& s, const Array& candidates, std::size_t n_samples, double radius, double min_angle,
           std::uint64_t seed) {
          py::list out;
          for (const auto& r : nash_check(to_sym(s), to_rows(candidates), {n_samples, radius, min_angle, seed})) {
            py::dict d;
            d["k"] = r.k;
            d["value_at_candidate"] = r.value_at_candidate;
            d["max_perturbed_value"] = r.max_perturbed_value;
            d["n_samples"] = r.n_samples;
            d["radius"] = r.radius;
            d["strict"] = r.strict;
            out.append(d);
          }
          return out;
        },
        py::arg("sigma"), py::arg("candidates"), py::arg("n_samples") = 1000, py::arg("radius") = 0.1,
        py::arg("min_angle") = 1e-3, py::arg("seed") = 0);

  m.def("lambert_w_m1", &lambert_w_m1);
  m.def("w_hat", &w_hat);
  m.def("mk_schedule", [](const std::vector<double>& F) { return mk_schedule(F); });
  m.def("sk_schedule", [](const std::vector<double>& mv, const std::vector<double>& spectrum, double c0) {
    return sk_schedule(mv, spectrum, c0);
  }, py::arg("m"), py::arg("spectrum"), py::arg("c0") = 3.0);
  m.def("lemma4_threshold", &lemma4_threshold);
  m.def("comm_cost", &comm_cost);
  m.def("davis_kahan_gap_bound", [](const Array& mstar, const Array& h) {
    const auto b = davis_kahan_gap_bound(to_sym(mstar), to_sym(h));
    return py::make_tuple(b.lhs, b.rhs);
  });
  m.def("deflation_perturbation_bound",
        [](const std::vector<double>& spectrum, const std::vector<double>& errors, double c0) {
          const auto b = deflation_perturbation_bound(spectrum, errors, c0);
          return py::make_tuple(b.bound, b.hypothesis_holds);
        },
        py::arg("spectrum"), py::arg("peer_errors"), py::arg("c0") = 3.0);

  m.def("recovery_error", [](const Array& truth, const Array& est) {
    return recovery_error(to_rows(truth), to_rows(est));
  });
  m.def("discounted_rayleigh", [](const Array& est, const Array& sigma) {
    return discounted_rayleigh(to_rows(est), to_sym(sigma));
  });
  m.def("discounted_rayleigh_streamed", [](const Array& est, const Array& data) {
    return discounted_rayleigh(to_rows(est), to_data(data));
  });
  m.def("spectrum_powerlaw", &spectrum_powerlaw);
  m.def("spectrum_expdecay", &spectrum_expdecay);
  m.def("spectrum_geometric", &spectrum_geometric);
  m.def("random_covariance", [](const std::vector<double>& spectrum, std::uint64_t seed) {
    const auto cs = random_covariance(spectrum, seed);
    return py::make_tuple(from_sym(cs.sigma), cs.eigen.values, from_rows(cs.eigen.vectors, spectrum.size()));
  });

  m.def("run_experiment", [](const std::map<std::string, std::string>& settings) {
    ExperimentConfig cfg;
    for (const auto& [k, v] : settings) apply_setting(cfg, k, v);
    const auto r = run_experiment(cfg);
    py::dict d;
    d["algorithm"] = r.algorithm;
    d["T"] = r.T;
    d["oracle"] = r.oracle;
    d["final_errors"] = r.final_errors;
    d["final_metrics"] = r.final_metrics;
    d["aggregate_csv"] = aggregate_csv(r);
    std::vector<std::string> files;
    for (const auto& f : r.files) files.push_back(f.string());
    d["files"] = files;
    return d;
  });
}
