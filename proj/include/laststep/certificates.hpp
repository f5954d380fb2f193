#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "laststep/problem.hpp"
#include "laststep/schedule.hpp"
#include "laststep/sgd.hpp"

namespace laststep {

// Backward recursion L_{t-1} = L_t + L_t^2 from L_{t1} = 1/(e r); every
// entry stays in [1/(e r), 1/r].
struct MartingaleWeights {
  std::uint64_t t0 = 0, t1 = 0;
  std::vector<double> L;  // L[j] = L_{t0+j}

  std::uint64_t range() const { return t1 - t0 + 1; }
  double at(std::uint64_t t) const { return L[t - t0]; }
};

MartingaleWeights martingale_weights(std::uint64_t t0, std::uint64_t t1);

// Forward mass-transfer distribution kappa over (support_lo, .., support_hi]
// built from an input distribution q on {support_lo..support_mid}; all mass
// stays at or below support_mid and sums to one.
struct TransferDistribution {
  std::uint32_t phase = 0;
  std::uint64_t support_lo = 0;   // t0
  std::uint64_t support_mid = 0;  // T_{i+1}
  std::uint64_t support_hi = 0;   // T_{i+2}
  std::vector<double> kappa;      // indexed support_lo..support_hi
  std::vector<double> q;

  double kappa_at(std::uint64_t t) const { return kappa[t - support_lo]; }
  double total() const;
  // partial sums sigma(t) = sum_{s<=t} kappa(s) for the recursion identity
  double sigma_at(std::uint64_t t) const;
};

TransferDistribution transfer_distribution(std::span<const double> q, std::uint32_t phase,
                                           const Breakpoints& bp, const StepSchedule& sched);

// Weighted deviation statistics of one trace over the window [t0, t1].
struct DeviationStats {
  double A = 0.0;       // anchored at x_l
  double A_star = 0.0;  // anchored at the optimum value
  double pA = 0.0;      // p-mixture of A(l, t1) over l in [t0, t1]
};

double deviation_A(const Trace& trace, std::uint64_t l, std::uint64_t t0, std::uint64_t t1,
                   const StepSchedule& sched, double G);
double deviation_A_star(const Trace& trace, std::uint64_t t0, std::uint64_t t1,
                        const StepSchedule& sched, double G, double f_star);
double deviation_pA(const Trace& trace, std::span<const double> p, std::uint64_t t0,
                    std::uint64_t t1, const StepSchedule& sched, double G);
DeviationStats deviation_stats(const Trace& trace, std::span<const double> p, std::uint64_t l,
                               std::uint64_t t0, std::uint64_t t1, const StepSchedule& sched,
                               double G, double f_star);

// One row of a certificate report: lhs <= rhs with margin = rhs - lhs.
struct CheckResult {
  std::string check;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass = false;
};
using CertificateReport = std::vector<CheckResult>;

bool all_pass(const CertificateReport& report);

CheckResult make_check(std::string name, std::string params, double lhs, double rhs);

// sum_t 2 alpha_t E[F(x_t) - F(x_{t0})] <= sum_t G^2 alpha_t^2, estimated
// across seeds with 3-stderr slack (exact when the problem is deterministic,
// meaning the stochastic oracle coincides with the mean).
CheckResult check_lookahead(const Problem& problem, const StepSchedule& sched, std::uint64_t t0,
                            std::uint64_t t1, std::uint32_t n_seeds, std::uint64_t seed0,
                            int threads);

// Empirical tail of the p-mixture deviation statistic against
// exp(-eta / (8 alpha_{t0}^2 G^2)) over a grid of eta values; p is uniform
// over [t0, t1]. Adds one row per eta, plus the anchored A* variant.
CertificateReport check_tail(const Problem& problem, const StepSchedule& sched, std::uint64_t t0,
                             std::uint64_t t1, std::span<const double> eta_multipliers,
                             std::uint32_t n_seeds, std::uint64_t seed0, int threads);

// Per-phase argmins of the estimated mean objective: tau_i over (T_i, T_{i+1}]
// for i >= 1, tau_0 over [ceil(T/4), T_1], ties to the smallest t.
std::vector<std::uint64_t> phase_argmins(const EnsembleSummary& ensemble, const Breakpoints& bp);

// E[F(x_{tau_{i+1}})] - E[F(x_{tau_i})] <= (5 G^2 gamma_T / beta^2) 2^-i for
// i >= 1, and <= 5 G^2 gamma_T / beta^4 for i = 0, with 3-stderr slack. The
// base schedule is modified internally.
CertificateReport check_transfer(const Problem& problem, const StepSchedule& base,
                                 std::uint32_t n_seeds, std::uint64_t seed0, int threads);

// Exact suites used by both the CLI and the acceptance harness.
CertificateReport breakpoints_suite(std::uint64_t dense_max, std::uint32_t dyadic_log2_max);
CertificateReport weights_suite(std::span<const std::uint64_t> ranges);
CertificateReport kappa_suite(std::uint32_t n_configs, std::uint64_t seed);

}  // namespace laststep
