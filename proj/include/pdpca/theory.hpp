#pragma once

// Convergence-rate schedule, error-bound checks and the perturbation
// bounds behind them.

#include <span>
#include <string>
#include <vector>

#include "pdpca/linalg.hpp"
#include "pdpca/round_engine.hpp"
#include "pdpca/top1.hpp"

namespace pdpca {

// Lower branch of the inverse of w e^w, for x in [-1/e, 0). Returns w <= -1.
double lambert_w_m1(double x);

// -W_{-1}(-a) for a in (0, 1/e), 1 for a >= 1/e.
double w_hat(double a);

// m_1 = F_1, m_{k+1} = max(F_{k+1}, 1/(k+1) + k/(k+1) m_k).
std::vector<double> mk_schedule(std::span<const double> F);

// Start rounds s_k. s_1 = 1 and s_{k+1} is the ceiling of
//   max_{k' <= k} [ max(W(m_k log(1/m_k)) / log(1/m_k), (k m_k + 1) / (1 - m_k))
//                   + W((l_{k+1} - l_{k+2}) / (4 c0 k l_{k'}) log(1/m_k)^2) / log(1/m_{k'})
//                   + s_{k'} ]
// with W = w_hat. spectrum needs K + 1 entries (K + 2 when available is
// fine), strictly decreasing and positive with spectrum[0] == 1.
std::vector<int> sk_schedule(std::span<const double> m, std::span<const double> spectrum, double c0 = 3.0);

struct ConvergenceSchedule {
  std::size_t K = 0;
  std::vector<double> F;
  std::vector<double> m;
  std::vector<int> s;
  double c0 = 3.0;
};

// Rescales the spectrum so its leading value is 1, then m and s.
ConvergenceSchedule make_schedule(std::span<const double> F, std::span<const double> spectrum, double c0 = 3.0);

// F_k from contraction_estimate on the ideal deflated spectra
// (0, ..., 0, l_k, ..., l_d), k = 1..K.
std::vector<double> ideal_contractions(std::span<const double> spectrum, std::size_t K, const Top1Config& solver);

struct BoundEntry {
  std::size_t k = 0;
  std::size_t round = 0;
  double error = 0.0;
  double bound = 0.0;
  bool ok = true;
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  std::size_t violations = 0;
  double floor = 0.0;
};

// Checks error(k, l) <= 6 (l - s_k + 2) m_k^(l - s_k + 1) + floor for every
// l >= max(1, s_k - 1). `floor` absorbs rounding once the bound drops below
// machine precision. Throws ErrorKind::Coverage if the trace is shorter
// than s_K.
BoundReport check_bound(const RunTrace& trace, const ConvergenceSchedule& schedule, double floor = 1e-12);

std::string schedule_csv(const ConvergenceSchedule& schedule);
std::string bound_csv(const BoundReport& report);

struct AngleBound {
  double lhs = 0.0;  // sin of the angle between top eigenvectors of M* and M* + H
  double rhs = 0.0;  // ||H||_2 / min_{j >= 2} |s_1(M*) - s_j(M* + H)|
};

AngleBound davis_kahan_gap_bound(const SymMatrix& mstar, const SymMatrix& h);

struct PerturbationBound {
  double bound = 0.0;
  bool hypothesis_holds = true;
};

// For component k = peer_errors.size() + 1:
//   bound = 4 c0 / (l_k - l_{k+1}) * sum_i l_i e_i
//   hypothesis: sum_i l_i e_i <= (c0 - 1) / (4 c0) * (l_k - l_{k+1})
PerturbationBound deflation_perturbation_bound(std::span<const double> spectrum,
                                               std::span<const double> peer_errors, double c0 = 3.0);

// Smallest x >= 0 with m^x (x + 1) <= eps for all larger x.
double lemma4_threshold(double m, double eps);

// K (K - 1) / 2 * C * d.
double comm_cost(std::size_t K, double c_comm, std::size_t d);

}  // namespace pdpca
