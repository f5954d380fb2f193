#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "laststep/problem.hpp"
#include "laststep/schedule.hpp"

namespace laststep {

enum class RecordMode { objectives_only, full_iterates };

struct RunConfig {
  StepSchedule schedule;
  std::vector<double> x1;  // empty = problem default start
  std::uint64_t seed = 0;
  RecordMode record = RecordMode::objectives_only;
  bool deterministic = false;  // use the mean subgradient (plain GD)
};

struct Trace {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::size_t dim = 0;
  std::vector<double> objective_values;  // F(x_t), t = 1..T, as evaluated in the run
  std::vector<double> iterates;          // row-major T x dim when recorded, else empty

  std::uint64_t horizon() const { return objective_values.size(); }
  bool has_iterates() const { return !iterates.empty(); }
  std::span<const double> iterate(std::uint64_t t) const {
    return std::span<const double>(iterates).subspan((t - 1) * dim, dim);
  }
};

std::uint64_t config_hash(const RunConfig& config);

// x_{t+1} = project(x_t - alpha_t g_t(x_t)); T iterates, T-1 oracle calls.
Trace run_sgd(const Problem& problem, const RunConfig& config);

struct SuffixAverage {
  std::vector<double> point;
  double value = 0.0;
};

// mean of x_t over t in (ceil((1-fraction) T), T] and F at that mean
SuffixAverage suffix_average(const Problem& problem, const Trace& trace, double fraction);

// F((1/t) sum_{s<=t} x_s) for every t
std::vector<double> running_average(const Problem& problem, const Trace& trace);

struct EnsembleSummary {
  std::uint32_t n_seeds = 0;
  std::uint64_t seed0 = 0;
  double f_star = 0.0;
  std::vector<double> mean_subopt;  // E[F(x_t)] - f_star estimate per t
  std::vector<double> std_err;      // across-seed standard error of the mean

  std::uint64_t horizon() const { return mean_subopt.size(); }
};

// Independent runs with seeds seed0..seed0+n_seeds-1, reduced over a fixed
// pairwise tree so the result is bitwise identical for any thread count.
EnsembleSummary run_ensemble(const Problem& problem, const RunConfig& base, std::uint32_t n_seeds,
                             std::uint64_t seed0, double f_star, int threads);

// Same reduction machinery for an arbitrary per-run statistic vector.
struct CurveStats {
  std::vector<double> mean;
  std::vector<double> std_err;
};
CurveStats ensemble_curves(std::uint32_t n_seeds, int threads,
                           const std::function<std::vector<double>(std::uint32_t)>& curve_of_seed);

}  // namespace laststep
