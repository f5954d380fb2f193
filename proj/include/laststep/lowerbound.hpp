#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace laststep {

// Dyadic index blocks I_k = {2^k .. 2^{k+1}-1} with run length
// tau_k = 2^floor(log2(k/2)) and the floor(|I_k|/tau_k) contiguous
// subblocks J_k(i) used by the all-plus-signs events.
struct IntervalPartition {
  std::uint32_t max_level = 0;

  std::uint64_t level_lo(std::uint32_t k) const { return std::uint64_t(1) << k; }
  std::uint64_t level_hi(std::uint32_t k) const { return (std::uint64_t(1) << (k + 1)) - 1; }
  std::uint64_t level_size(std::uint32_t k) const { return std::uint64_t(1) << k; }
  std::uint64_t run_length(std::uint32_t k) const;                     // tau_k, k >= 2
  std::uint64_t block_count(std::uint32_t k) const;                    // floor(|I_k| / tau_k)
  std::uint64_t block_lo(std::uint32_t k, std::uint64_t block) const;  // J_k(block), 0-based
};

IntervalPartition interval_partition(std::uint32_t max_level);  // needs max_level >= 4

// Exact second-moment recursion E z_{t+1}^2 = (1-gamma_t)^2 E z_t^2 + gamma_t^2
// started from the first time t_zero after which every step is below one;
// entries before t_zero are pinned at 1.
struct SquareRecursion {
  std::uint64_t t_zero = 1;  // horizon + 1 when the steps never drop below one
  std::vector<double> expected_sq;
};

SquareRecursion expected_square_recursion(std::span<const double> gamma, std::uint64_t horizon);

// Monte-Carlo drift of |x_t| for SGD on |x| + x^2/2 from x_1 = 1; checks the
// floor E|x_{t+1}| >= min(1, gamma_t)/2.
struct DriftEstimate {
  std::vector<double> mean_abs;  // E|x_t| estimate, t = 1..T
  std::vector<double> std_err;
};

DriftEstimate simulate_drift(std::span<const double> gamma, std::uint64_t horizon,
                             std::uint32_t n_seeds, std::uint64_t seed0, int threads);

// All-ones-block event A_k over I_k: empirical complement probability with a
// 3-sigma binomial band, plus the exact (1 - 2^-tau_k)^blocks oracle.
struct EventEstimate {
  double p_complement = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double oracle = 0.0;
};

EventEstimate estimate_event(std::uint32_t level, std::uint32_t n_trials, std::uint64_t seed);
double event_complement_oracle(std::uint32_t level);

// Finite-horizon diagnostics for an infinite-horizon step size sequence:
//   eta_k = 2^k sum_{I_k} gamma^2 / (sum_{I_k} gamma)^2, lam_k = sum_{I_k} gamma.
// A sequence is flagged super-harmonic when the per-level peaks of t*gamma_t
// keep growing, expectation-bad when max(eta_k, 1/lam_k) keeps growing, and
// almost-surely-bad when some level >= min_level has eta_k <= c0 and
// lam_k >= d0.
struct TrichotomyOptions {
  double c0 = 10.0;
  double d0 = 0.1;
  std::uint32_t window = 5;      // levels of sustained growth required
  double growth_ratio = 1.2;     // minimum total growth across the window
  std::uint32_t min_level = 4;   // smallest level eligible to witness flags
  // a level whose total step mass falls below this is counted as conclusive
  // d_k -> 0 evidence; eta is not representable there
  double lambda_tiny = 1e-300;
};

struct ScheduleDiagnostics {
  std::vector<double> eta;          // index = level k, 0..K
  std::vector<double> lam;
  std::vector<double> peak_t_gamma; // max over I_k of t * gamma_t
  bool super_harmonic = false;
  bool expectation_bad = false;
  bool almost_surely_bad = false;
  std::vector<std::uint32_t> as_witnesses;      // levels with eta <= c0 and lam >= d0
  std::vector<std::uint32_t> growth_witnesses;  // the growth window levels
};

// gamma must cover indices 1..2^{max_level+1}-1 (gamma[t-1] is the step at t)
ScheduleDiagnostics schedule_trichotomy(std::span<const double> gamma, std::uint32_t max_level,
                                        const TrichotomyOptions& opts = {});

}  // namespace laststep
