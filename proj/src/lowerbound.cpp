#include "laststep/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "laststep/errors.hpp"
#include "laststep/problem.hpp"
#include "laststep/rng.hpp"
#include "laststep/schedule.hpp"
#include "laststep/sgd.hpp"

namespace laststep {

std::uint64_t IntervalPartition::run_length(std::uint32_t k) const {
  if (k < 2) fail(errc::level_too_small, "run length is undefined below level 2");
  std::uint32_t log2k = 0;
  while ((std::uint64_t(1) << (log2k + 1)) <= k) ++log2k;
  return std::uint64_t(1) << (log2k - 1);  // 2^(floor(log2 k) - 1) = 2^floor(log2(k/2))
}

std::uint64_t IntervalPartition::block_count(std::uint32_t k) const {
  return level_size(k) / run_length(k);
}

std::uint64_t IntervalPartition::block_lo(std::uint32_t k, std::uint64_t block) const {
  return level_lo(k) + block * run_length(k);
}

IntervalPartition interval_partition(std::uint32_t max_level) {
  if (max_level < 4) fail(errc::level_too_small, "need max_level >= 4");
  IntervalPartition p;
  p.max_level = max_level;
  return p;
}

SquareRecursion expected_square_recursion(std::span<const double> gamma, std::uint64_t horizon) {
  if (horizon < 1 || gamma.size() < horizon)
    fail(errc::insufficient_horizon, "gamma must cover the horizon");
  for (std::uint64_t t = 0; t < horizon; ++t)
    if (!(gamma[t] > 0.0)) fail(errc::nonpositive_step, "steps must be positive");

  SquareRecursion out;
  out.expected_sq.assign(horizon, 1.0);
  // smallest t with gamma_s < 1 for all s >= t (within the horizon)
  std::uint64_t t_zero = horizon + 1;
  for (std::uint64_t t = horizon; t >= 1; --t) {
    if (gamma[t - 1] >= 1.0) break;
    t_zero = t;
    if (t == 1) break;
  }
  out.t_zero = t_zero;
  for (std::uint64_t t = t_zero; t < horizon; ++t) {
    const double g = gamma[t - 1];
    out.expected_sq[t] = (1.0 - g) * (1.0 - g) * out.expected_sq[t - 1] + g * g;
  }
  return out;
}

DriftEstimate simulate_drift(std::span<const double> gamma, std::uint64_t horizon,
                             std::uint32_t n_seeds, std::uint64_t seed0, int threads) {
  if (horizon < 1 || gamma.size() < horizon)
    fail(errc::insufficient_horizon, "gamma must cover the horizon");
  auto problem = make_abs_quadratic();

  StepSchedule sched;
  sched.horizon = horizon;
  sched.family = Family::custom;
  sched.alpha.assign(gamma.begin(), gamma.begin() + horizon);

  auto curve = [&](std::uint32_t idx) {
    RunConfig config;
    config.schedule = sched;
    config.seed = mix_seed(seed0, idx);
    config.record = RecordMode::full_iterates;
    Trace trace = run_sgd(*problem, config);
    std::vector<double> abs_x(horizon);
    for (std::uint64_t t = 1; t <= horizon; ++t) abs_x[t - 1] = std::fabs(trace.iterate(t)[0]);
    return abs_x;
  };
  CurveStats stats = ensemble_curves(n_seeds, threads, curve);
  return DriftEstimate{std::move(stats.mean), std::move(stats.std_err)};
}

double event_complement_oracle(std::uint32_t level) {
  IntervalPartition p;
  const double tau = static_cast<double>(p.run_length(level));
  // block count in floating point so levels past 62 cannot overflow
  const double blocks = std::floor(std::pow(2.0, static_cast<double>(level)) / tau);
  return std::exp(blocks * std::log1p(-std::pow(2.0, -tau)));
}

EventEstimate estimate_event(std::uint32_t level, std::uint32_t n_trials, std::uint64_t seed) {
  if (level < 4) fail(errc::level_too_small, "need level >= 4");
  IntervalPartition p;
  const std::uint64_t tau = p.run_length(level);
  const std::uint64_t blocks = p.block_count(level);

  RngStream rng(seed);
  std::uint32_t misses = 0;  // trials where no block is all +1
  for (std::uint32_t trial = 0; trial < n_trials; ++trial) {
    bool hit = false;
    for (std::uint64_t b = 0; b < blocks; ++b) {
      bool all_plus = true;
      for (std::uint64_t j = 0; j < tau; ++j)
        if (rng.next_rademacher() < 0.0) all_plus = false;
      if (all_plus) hit = true;
    }
    if (!hit) ++misses;
  }
  EventEstimate e;
  const double n = static_cast<double>(n_trials);
  e.p_complement = static_cast<double>(misses) / n;
  // Wilson interval at three sigmas; stays informative at zero counts
  const double z2 = 9.0;
  const double center = (e.p_complement + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = 3.0 *
                      std::sqrt(e.p_complement * (1.0 - e.p_complement) / n +
                                z2 / (4.0 * n * n)) /
                      (1.0 + z2 / n);
  e.ci_lo = std::max(0.0, center - half);
  e.ci_hi = std::min(1.0, center + half);
  e.oracle = event_complement_oracle(level);
  return e;
}

ScheduleDiagnostics schedule_trichotomy(std::span<const double> gamma, std::uint32_t max_level,
                                        const TrichotomyOptions& opts) {
  const std::uint64_t need = (std::uint64_t(1) << (max_level + 1)) - 1;
  if (gamma.size() < need)
    fail(errc::insufficient_horizon, "gamma must cover indices up to 2^(K+1)-1");
  if (max_level < opts.window + 1 || max_level < opts.min_level)
    fail(errc::insufficient_horizon, "max_level too small for the requested window");

  IntervalPartition part;
  ScheduleDiagnostics d;
  d.eta.resize(max_level + 1);
  d.lam.resize(max_level + 1);
  d.peak_t_gamma.resize(max_level + 1);
  std::uint32_t last_sound = 0;  // largest level whose mass is representable
  bool vanished = false;
  for (std::uint32_t k = 0; k <= max_level; ++k) {
    double sum = 0.0, sum_sq = 0.0, peak = 0.0;
    for (std::uint64_t t = part.level_lo(k); t <= part.level_hi(k); ++t) {
      const double g = gamma[t - 1];
      sum += g;
      sum_sq += g * g;
      peak = std::max(peak, static_cast<double>(t) * g);
    }
    d.lam[k] = sum;
    d.peak_t_gamma[k] = peak;
    if (sum >= opts.lambda_tiny) {
      d.eta[k] = static_cast<double>(part.level_size(k)) * sum_sq / (sum * sum);
      last_sound = k;
    } else {
      d.eta[k] = std::numeric_limits<double>::quiet_NaN();
      if (k >= opts.min_level) {
        vanished = true;  // step mass below double resolution: d_k -> 0 beyond doubt
        d.growth_witnesses.push_back(k);
      }
    }
  }

  // sustained growth across the trailing window of representable levels:
  // strictly increasing and gaining at least growth_ratio in total (filters
  // drift toward a finite limit, e.g. 1/lam_k of the harmonic sequence)
  auto grows = [&](const std::vector<double>& v) {
    if (last_sound < opts.window) return false;
    const std::uint32_t lo = last_sound - opts.window;
    for (std::uint32_t k = lo; k < last_sound; ++k)
      if (!(v[k + 1] > v[k])) return false;
    return v[last_sound] >= opts.growth_ratio * v[lo];
  };

  std::vector<double> worse(max_level + 1, 0.0);
  for (std::uint32_t k = 0; k <= last_sound; ++k) worse[k] = std::max(d.eta[k], 1.0 / d.lam[k]);

  d.super_harmonic = grows(d.peak_t_gamma);
  d.expectation_bad = grows(worse) || vanished;
  if (d.super_harmonic || d.expectation_bad)
    for (std::uint32_t k = last_sound - std::min(opts.window, last_sound); k <= last_sound; ++k)
      d.growth_witnesses.push_back(k);
  std::sort(d.growth_witnesses.begin(), d.growth_witnesses.end());

  for (std::uint32_t k = opts.min_level; k <= max_level && k <= last_sound; ++k)
    if (d.eta[k] <= opts.c0 && d.lam[k] >= opts.d0) d.as_witnesses.push_back(k);
  d.almost_surely_bad = !d.as_witnesses.empty();
  return d;
}

}  // namespace laststep
