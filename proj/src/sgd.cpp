#include "laststep/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>

#include "laststep/errors.hpp"
#include "laststep/rng.hpp"

namespace laststep {

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  // FNV-1a
  const unsigned char* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
}

}  // namespace

std::uint64_t config_hash(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  std::uint64_t t = config.schedule.horizon;
  hash_bytes(h, &t, sizeof t);
  int fam = static_cast<int>(config.schedule.family);
  hash_bytes(h, &fam, sizeof fam);
  hash_bytes(h, &config.schedule.scale, sizeof(double));
  hash_bytes(h, &config.schedule.lambda, sizeof(double));
  hash_bytes(h, config.schedule.alpha.data(), config.schedule.alpha.size() * sizeof(double));
  hash_bytes(h, config.x1.data(), config.x1.size() * sizeof(double));
  hash_bytes(h, &config.seed, sizeof config.seed);
  int rec = static_cast<int>(config.record);
  hash_bytes(h, &rec, sizeof rec);
  int det = config.deterministic ? 1 : 0;
  hash_bytes(h, &det, sizeof det);
  return h;
}

Trace run_sgd(const Problem& problem, const RunConfig& config) {
  const std::uint64_t horizon = config.schedule.horizon;
  if (horizon < 1 || config.schedule.alpha.size() != horizon)
    fail(errc::invalid_dimensions, "schedule length must equal the horizon");
  const std::size_t d = problem.dim();

  std::vector<double> x;
  if (config.x1.empty()) {
    x = problem.start_point();
  } else {
    if (config.x1.size() != d)
      fail(errc::dimension_mismatch, "start point dimension does not match the problem");
    x = config.x1;
    problem.project(std::span<double>(x));
  }

  Trace trace;
  trace.config_hash = config_hash(config);
  trace.seed = config.seed;
  trace.dim = d;
  trace.objective_values.resize(horizon);
  if (config.record == RecordMode::full_iterates) trace.iterates.resize(horizon * d);

  RngStream rng(config.seed);
  std::vector<double> g(d);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    trace.objective_values[t - 1] = problem.objective(x);
    if (config.record == RecordMode::full_iterates)
      std::copy(x.begin(), x.end(), trace.iterates.begin() + (t - 1) * d);
    if (t == horizon) break;
    if (config.deterministic)
      problem.mean_subgradient(x, std::span<double>(g));
    else
      problem.stochastic_subgradient(x, rng, std::span<double>(g));
    const double a = config.schedule.at(t);
    for (std::size_t j = 0; j < d; ++j) x[j] -= a * g[j];
    problem.project(std::span<double>(x));
  }
  return trace;
}

SuffixAverage suffix_average(const Problem& problem, const Trace& trace, double fraction) {
  if (!trace.has_iterates()) fail(errc::iterates_not_recorded, "suffix_average needs iterates");
  if (!(fraction > 0.0) || fraction > 1.0)
    fail(errc::out_of_range, "fraction must lie in (0, 1]");
  const std::uint64_t horizon = trace.horizon();
  const auto lo = static_cast<std::uint64_t>(
      std::ceil((1.0 - fraction) * static_cast<double>(horizon)));  // window is (lo, T]
  SuffixAverage out;
  out.point.assign(trace.dim, 0.0);
  const double inv = 1.0 / static_cast<double>(horizon - lo);
  for (std::uint64_t t = lo + 1; t <= horizon; ++t) {
    auto xt = trace.iterate(t);
    for (std::size_t j = 0; j < trace.dim; ++j) out.point[j] += inv * xt[j];
  }
  out.value = problem.objective(out.point);
  return out;
}

std::vector<double> running_average(const Problem& problem, const Trace& trace) {
  if (!trace.has_iterates()) fail(errc::iterates_not_recorded, "running_average needs iterates");
  const std::uint64_t horizon = trace.horizon();
  std::vector<double> sum(trace.dim, 0.0), mean(trace.dim);
  std::vector<double> values(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    auto xt = trace.iterate(t);
    for (std::size_t j = 0; j < trace.dim; ++j) sum[j] += xt[j];
    const double inv = 1.0 / static_cast<double>(t);
    for (std::size_t j = 0; j < trace.dim; ++j) mean[j] = sum[j] * inv;
    values[t - 1] = problem.objective(mean);
  }
  return values;
}

namespace {

struct Moments {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

// Fixed binary tree over seed indices [lo, hi); the reduction order never
// depends on the thread count, only on the index range.
Moments reduce_tree(std::uint32_t lo, std::uint32_t hi, int threads,
                    const std::function<std::vector<double>(std::uint32_t)>& curve_of_seed) {
  if (hi - lo == 1) {
    std::vector<double> v = curve_of_seed(lo);
    Moments m;
    m.sum_sq.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) m.sum_sq[i] = v[i] * v[i];
    m.sum = std::move(v);
    return m;
  }
  const std::uint32_t mid = lo + (hi - lo) / 2;
  Moments left, right;
  if (threads > 1) {
    auto fut = std::async(std::launch::async, reduce_tree, mid, hi, threads / 2,
                          std::cref(curve_of_seed));
    left = reduce_tree(lo, mid, threads - threads / 2, curve_of_seed);
    right = fut.get();
  } else {
    left = reduce_tree(lo, mid, 1, curve_of_seed);
    right = reduce_tree(mid, hi, 1, curve_of_seed);
  }
  for (std::size_t i = 0; i < left.sum.size(); ++i) {
    left.sum[i] += right.sum[i];
    left.sum_sq[i] += right.sum_sq[i];
  }
  return left;
}

}  // namespace

CurveStats ensemble_curves(std::uint32_t n_seeds, int threads,
                           const std::function<std::vector<double>(std::uint32_t)>& curve_of_seed) {
  if (n_seeds < 1) fail(errc::invalid_dimensions, "need at least one seed");
  Moments m = reduce_tree(0, n_seeds, std::max(threads, 1), curve_of_seed);
  const double n = static_cast<double>(n_seeds);
  CurveStats out;
  out.mean.resize(m.sum.size());
  out.std_err.assign(m.sum.size(), 0.0);
  for (std::size_t i = 0; i < m.sum.size(); ++i) {
    out.mean[i] = m.sum[i] / n;
    if (n_seeds > 1) {
      double var = (m.sum_sq[i] - m.sum[i] * m.sum[i] / n) / (n - 1.0);
      out.std_err[i] = std::sqrt(std::max(var, 0.0) / n);
    }
  }
  return out;
}

EnsembleSummary run_ensemble(const Problem& problem, const RunConfig& base, std::uint32_t n_seeds,
                             std::uint64_t seed0, double f_star, int threads) {
  auto curve = [&](std::uint32_t idx) {
    RunConfig config = base;
    config.seed = seed0 + idx;
    config.record = RecordMode::objectives_only;
    try {
      Trace trace = run_sgd(problem, config);
      for (double& v : trace.objective_values) v -= f_star;
      return std::move(trace.objective_values);
    } catch (const Error& e) {
      throw Error(e.code(),
                  std::string(e.what()) + " (seed " + std::to_string(config.seed) + ")");
    }
  };
  CurveStats stats = ensemble_curves(n_seeds, threads, curve);
  EnsembleSummary out;
  out.n_seeds = n_seeds;
  out.seed0 = seed0;
  out.f_star = f_star;
  out.mean_subopt = std::move(stats.mean);
  out.std_err = std::move(stats.std_err);
  return out;
}

}  // namespace laststep
