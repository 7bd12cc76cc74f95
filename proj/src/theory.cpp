#include "pdpca/theory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "pdpca/errors.hpp"

namespace pdpca {

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

void check_normalized_spectrum(std::span<const double> spectrum, std::size_t needed, const char* who) {
  if (spectrum.size() < needed) {
    std::ostringstream msg;
    msg << who << ": spectrum needs " << needed << " values, got " << spectrum.size();
    fail(ErrorKind::Spectrum, msg.str());
  }
  if (std::abs(spectrum[0] - 1.0) > 1e-12) fail(ErrorKind::Spectrum, std::string(who) + ": leading eigenvalue must be 1");
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (!(spectrum[i] > 0.0)) fail(ErrorKind::Spectrum, std::string(who) + ": eigenvalues must be positive");
    if (i > 0 && !(spectrum[i] < spectrum[i - 1]))
      fail(ErrorKind::Spectrum, std::string(who) + ": eigenvalues must be strictly decreasing");
  }
}

}  // namespace

double lambert_w_m1(double x) {
  if (!(x >= -kInvE - 1e-16 && x < 0.0)) {
    std::ostringstream msg;
    msg << std::setprecision(17) << "lambert_w_m1: argument " << x << " outside [-1/e, 0)";
    fail(ErrorKind::Domain, msg.str());
  }
  const double q = 1.0 + std::numbers::e * x;  // distance from the branch point, scaled
  if (q <= 1e-12) return -1.0;

  double w;
  if (q < 0.25) {
    const double p = -std::sqrt(2.0 * q);
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }
  // Halley on h(w) = w + log(-w) - log(-x), which stays well scaled for tiny |x|
  const double target = std::log(-x);
  for (int it = 0; it < 100; ++it) {
    const double h = w + std::log(-w) - target;
    const double h1 = 1.0 + 1.0 / w;
    const double h2 = -1.0 / (w * w);
    const double step = 2.0 * h * h1 / (2.0 * h1 * h1 - h * h2);
    double next = w - step;
    if (next > -1.0) next = 0.5 * (w - 1.0);
    const bool done = std::abs(next - w) <= 4e-16 * std::abs(w);
    w = next;
    if (done) break;
  }
  return w;
}

double w_hat(double a) {
  if (!(a > 0.0)) fail(ErrorKind::Domain, "w_hat: argument must be positive");
  if (a >= std::exp(-1.0)) return 1.0;
  return -lambert_w_m1(-a);
}

std::vector<double> mk_schedule(std::span<const double> F) {
  if (F.empty()) fail(ErrorKind::Domain, "mk_schedule: empty F");
  std::vector<double> m(F.size());
  for (std::size_t k = 0; k < F.size(); ++k) {
    if (!(F[k] > 0.0 && F[k] < 1.0)) {
      std::ostringstream msg;
      msg << "mk_schedule: F_" << k + 1 << " = " << F[k] << " outside (0, 1)";
      fail(ErrorKind::Domain, msg.str());
    }
    if (k == 0) {
      m[0] = F[0];
    } else {
      const double kk = static_cast<double>(k);
      m[k] = std::max(F[k], 1.0 / (kk + 1.0) + kk / (kk + 1.0) * m[k - 1]);
    }
  }
  return m;
}

std::vector<int> sk_schedule(std::span<const double> m, std::span<const double> spectrum, double c0) {
  const std::size_t K = m.size();
  if (K == 0) fail(ErrorKind::Domain, "sk_schedule: empty m");
  for (std::size_t k = 0; k < K; ++k)
    if (!(m[k] > 0.0 && m[k] < 1.0)) {
      std::ostringstream msg;
      msg << "sk_schedule: m_" << k + 1 << " = " << m[k] << " outside (0, 1)";
      fail(ErrorKind::Domain, msg.str());
    }
  if (!(c0 > 1.0)) fail(ErrorKind::Domain, "sk_schedule: c0 must exceed 1");
  std::vector<int> s{1};
  if (K == 1) return s;
  check_normalized_spectrum(spectrum, K + 1, "sk_schedule");

  auto lambda = [&](std::size_t i) { return i <= spectrum.size() ? spectrum[i - 1] : 0.0; };
  for (std::size_t k = 1; k < K; ++k) {
    const double mk = m[k - 1];
    const double log_k = std::log(1.0 / mk);
    const double lead = std::max(w_hat(mk * log_k) / log_k,
                                 (static_cast<double>(k) * mk + 1.0) / (1.0 - mk));
    const double gap = lambda(k + 1) - lambda(k + 2);
    double best = -1.0;
    for (std::size_t kp = 1; kp <= k; ++kp) {
      const double arg = gap / (4.0 * c0 * static_cast<double>(k) * lambda(kp)) * log_k * log_k;
      const double term = lead + w_hat(arg) / std::log(1.0 / m[kp - 1]) + s[kp - 1];
      best = std::max(best, term);
    }
    s.push_back(std::max(static_cast<int>(std::ceil(best)), s.back()));
  }
  return s;
}

ConvergenceSchedule make_schedule(std::span<const double> F, std::span<const double> spectrum, double c0) {
  if (spectrum.empty() || !(spectrum[0] > 0.0)) fail(ErrorKind::Spectrum, "schedule: spectrum must be positive");
  std::vector<double> scaled(spectrum.begin(), spectrum.end());
  for (double& x : scaled) x /= spectrum[0];
  ConvergenceSchedule out;
  out.K = F.size();
  out.F.assign(F.begin(), F.end());
  out.c0 = c0;
  out.m = mk_schedule(F);
  out.s = sk_schedule(out.m, scaled, c0);
  return out;
}

std::vector<double> ideal_contractions(std::span<const double> spectrum, std::size_t K, const Top1Config& solver) {
  if (K > spectrum.size()) fail(ErrorKind::Config, "K exceeds dimension");
  std::vector<double> out;
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> diag(spectrum.begin(), spectrum.end());
    std::fill(diag.begin(), diag.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
    out.push_back(contraction_estimate(SymMatrix::diagonal(diag), solver).factor);
  }
  return out;
}

BoundReport check_bound(const RunTrace& trace, const ConvergenceSchedule& schedule, double floor) {
  if (!trace.has_errors()) fail(ErrorKind::Precondition, "check_bound: trace has no oracle errors");
  if (schedule.s.size() != schedule.m.size() || schedule.s.empty())
    fail(ErrorKind::Config, "check_bound: malformed schedule");
  if (schedule.s.size() > trace.workers) fail(ErrorKind::Config, "check_bound: schedule has more components than the trace");
  const int needed = *std::max_element(schedule.s.begin(), schedule.s.end());
  if (trace.length() < static_cast<std::size_t>(needed)) {
    std::ostringstream msg;
    msg << "check_bound: trace has " << trace.length() << " rounds, schedule requires L >= " << needed;
    fail(ErrorKind::Coverage, msg.str());
  }
  BoundReport report;
  report.floor = floor;
  for (std::size_t k = 1; k <= schedule.s.size(); ++k) {
    const int sk = schedule.s[k - 1];
    const double mk = schedule.m[k - 1];
    for (std::size_t l = static_cast<std::size_t>(std::max(1, sk - 1)); l <= trace.length(); ++l) {
      const double offset = static_cast<double>(l) - sk;
      BoundEntry e;
      e.k = k;
      e.round = l;
      e.error = trace.error(l, k);
      e.bound = 6.0 * (offset + 2.0) * std::pow(mk, offset + 1.0);
      e.ok = e.error <= e.bound + floor;
      if (!e.ok) ++report.violations;
      report.entries.push_back(e);
    }
  }
  return report;
}

std::string schedule_csv(const ConvergenceSchedule& schedule) {
  std::ostringstream out;
  out << std::setprecision(17) << "k,F,m,s\n";
  for (std::size_t k = 0; k < schedule.K; ++k)
    out << k + 1 << ',' << schedule.F[k] << ',' << schedule.m[k] << ',' << schedule.s[k] << '\n';
  return out.str();
}

std::string bound_csv(const BoundReport& report) {
  std::ostringstream out;
  out << std::setprecision(17) << "k,round,error,bound,ok\n";
  for (const auto& e : report.entries)
    out << e.k << ',' << e.round << ',' << e.error << ',' << e.bound << ',' << (e.ok ? 1 : 0) << '\n';
  return out.str();
}

AngleBound davis_kahan_gap_bound(const SymMatrix& mstar, const SymMatrix& h) {
  if (mstar.dim() != h.dim()) fail(ErrorKind::Dimension, "davis_kahan: dimension mismatch");
  if (mstar.dim() < 2) fail(ErrorKind::Dimension, "davis_kahan: need dimension >= 2");
  const EigenSystem star = reference_eigh(mstar);
  const double scale = std::max(std::abs(star.values[0]), 1e-300);
  if (star.values[0] - star.values[1] <= 1e-12 * scale)
    fail(ErrorKind::Spectrum, "davis_kahan: top eigenvalue is not simple");

  std::vector<double> sum(mstar.entries());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += h.entries()[i];
  const EigenSystem pert = reference_eigh(SymMatrix(mstar.dim(), std::move(sum)));

  const Vector& a = star.vectors[0];
  const Vector& b = pert.vectors[0];
  AngleBound out;
  out.lhs = norm2(add_scaled(a, -dot(a, b), b));
  double gap = std::abs(star.values[0] - pert.values[1]);
  for (std::size_t j = 2; j < pert.size(); ++j) gap = std::min(gap, std::abs(star.values[0] - pert.values[j]));
  const double hn = spectral_norm(h);
  out.rhs = hn == 0.0 ? 0.0 : hn / gap;
  return out;
}

PerturbationBound deflation_perturbation_bound(std::span<const double> spectrum,
                                               std::span<const double> peer_errors, double c0) {
  const std::size_t k = peer_errors.size() + 1;
  check_normalized_spectrum(spectrum, k + 1, "deflation_perturbation_bound");
  if (!(c0 > 1.0)) fail(ErrorKind::Domain, "deflation_perturbation_bound: c0 must exceed 1");
  const double gap = spectrum[k - 1] - spectrum[k];
  long double weighted = 0.0L;
  for (std::size_t i = 0; i < peer_errors.size(); ++i) {
    if (!(peer_errors[i] >= 0.0)) fail(ErrorKind::Domain, "deflation_perturbation_bound: negative error");
    weighted += static_cast<long double>(spectrum[i]) * peer_errors[i];
  }
  PerturbationBound out;
  out.bound = static_cast<double>(4.0L * c0 / gap * weighted);
  out.hypothesis_holds = weighted <= (c0 - 1.0) / (4.0 * c0) * gap;
  return out;
}

double lemma4_threshold(double m, double eps) {
  if (!(m > 0.0 && m < 1.0)) fail(ErrorKind::Domain, "lemma4_threshold: m must lie in (0, 1)");
  if (!(eps > 0.0)) fail(ErrorKind::Domain, "lemma4_threshold: eps must be positive");
  const double lm = std::log(m);
  const double peak = -1.0 / (std::numbers::e * m * lm);
  if (eps >= peak) return 0.0;
  const double arg = std::max(eps * m * lm, -kInvE);
  return lambert_w_m1(arg) / lm - 1.0;
}

double comm_cost(std::size_t K, double c_comm, std::size_t d) {
  if (K < 1) fail(ErrorKind::Domain, "comm_cost: K must be >= 1");
  const double pairs = static_cast<double>(K * (K - 1) / 2);
  return pairs * c_comm * static_cast<double>(d);
}

}  // namespace pdpca
