#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "laststep/errors.hpp"
#include "laststep/problem.hpp"
#include "laststep/rng.hpp"
#include "laststep/sgd.hpp"

using namespace laststep;

namespace {

StepSchedule flat_schedule(std::uint64_t horizon, double value) {
  StepSchedule s;
  s.horizon = horizon;
  s.family = Family::custom;
  s.alpha.assign(horizon, value);
  return s;
}

}  // namespace

TEST_CASE("deterministic contraction on the pure quadratic") {
  auto quad = make_pure_quadratic();
  RunConfig config;
  config.schedule = flat_schedule(4, 0.5);
  config.x1 = {1.0};
  config.record = RecordMode::full_iterates;
  config.deterministic = true;
  Trace trace = run_sgd(*quad, config);
  CHECK(trace.iterates == std::vector<double>{1.0, 0.5, 0.25, 0.125});
  for (std::uint64_t t = 1; t <= 4; ++t)
    CHECK(trace.objective_values[t - 1] ==
          0.5 * trace.iterate(t)[0] * trace.iterate(t)[0]);
}

TEST_CASE("zero steps keep every iterate at the start") {
  auto svm = make_svm(6, 20, 5.0, 1.0, 0.1, 3);
  RunConfig config;
  config.schedule = flat_schedule(16, 0.0);
  config.record = RecordMode::full_iterates;
  config.seed = 9;
  Trace trace = run_sgd(*svm, config);
  auto x1 = trace.iterate(1);
  for (std::uint64_t t = 2; t <= 16; ++t) {
    auto xt = trace.iterate(t);
    for (std::size_t j = 0; j < 6; ++j) CHECK(xt[j] == x1[j]);
  }
}

TEST_CASE("one adversarial step from the origin") {
  // pick a run seed whose first rademacher draw is +1
  std::uint64_t seed = 0;
  while (RngStream(seed).next_rademacher() < 0.0) ++seed;

  auto abs = make_abs_quadratic();
  const double step = 0.2;
  RunConfig config;
  config.schedule = flat_schedule(2, step);
  config.x1 = {0.0};
  config.seed = seed;
  config.record = RecordMode::full_iterates;
  Trace trace = run_sgd(*abs, config);
  // subgradient at 0 is 0 + 0 + 3, so x2 = max(-1, -3 step)
  CHECK(trace.iterate(2)[0] == doctest::Approx(std::max(-1.0, -3.0 * step)).epsilon(1e-15));
}

TEST_CASE("runs are bitwise deterministic and schedule-faithful") {
  auto svm = make_svm(6, 30, 5.0, 1.0, 0.1, 3);
  RunConfig config;
  config.schedule = strong_schedule(64, 0.1);
  config.seed = 12345;
  config.record = RecordMode::full_iterates;
  Trace a = run_sgd(*svm, config);
  Trace b = run_sgd(*svm, config);
  CHECK(a.objective_values == b.objective_values);
  CHECK(a.iterates == b.iterates);
  CHECK(a.config_hash == b.config_hash);

  config.seed = 12346;
  Trace c = run_sgd(*svm, config);
  CHECK(a.config_hash != c.config_hash);
  CHECK(a.objective_values != c.objective_values);

  // replaying the recorded iterates recovers x_{t+1} = proj(x_t - alpha_t g)
  // with exactly the schedule entry, for the deterministic path
  config.deterministic = true;
  Trace det = run_sgd(*svm, config);
  std::vector<double> g(6), x(6);
  for (std::uint64_t t = 1; t < 64; ++t) {
    auto xt = det.iterate(t);
    svm->mean_subgradient(xt, std::span<double>(g));
    for (std::size_t j = 0; j < 6; ++j) x[j] = xt[j] - config.schedule.at(t) * g[j];
    svm->project(std::span<double>(x));
    auto xn = det.iterate(t + 1);
    for (std::size_t j = 0; j < 6; ++j) CHECK(x[j] == xn[j]);
  }
}

TEST_CASE("iterates stay feasible") {
  auto abs = make_abs_quadratic();
  RunConfig config;
  config.schedule = flat_schedule(256, 0.9);
  config.seed = 5;
  config.record = RecordMode::full_iterates;
  Trace trace = run_sgd(*abs, config);
  for (std::uint64_t t = 1; t <= 256; ++t) CHECK(std::fabs(trace.iterate(t)[0]) <= 1.0);

  auto svm = make_svm(4, 16, 5.0, 1.0, 0.1, 3);
  config.schedule = flat_schedule(128, 2.0);
  Trace st = run_sgd(*svm, config);
  for (std::uint64_t t = 1; t <= 128; ++t) {
    double n = 0.0;
    for (double v : st.iterate(t)) n += v * v;
    CHECK(std::sqrt(n) <= 10.0 + 1e-9);
  }
}

TEST_CASE("dimension mismatch is rejected") {
  auto svm = make_svm(6, 20, 5.0, 1.0, 0.1, 3);
  RunConfig config;
  config.schedule = flat_schedule(8, 0.1);
  config.x1 = {1.0, 2.0};
  CHECK_THROWS_AS(run_sgd(*svm, config), Error);
}

TEST_CASE("suffix averages") {
  auto quad = make_pure_quadratic();
  RunConfig config;
  config.schedule = flat_schedule(8, 0.0);
  config.x1 = {0.7};
  config.record = RecordMode::full_iterates;
  Trace constant = run_sgd(*quad, config);
  CHECK(suffix_average(*quad, constant, 1.0).point[0] == doctest::Approx(0.7).epsilon(1e-15));

  config.schedule = flat_schedule(8, 0.25);
  config.x1 = {1.0};
  config.deterministic = true;
  Trace decay = run_sgd(*quad, config);
  // fraction 1/T leaves exactly the last iterate
  CHECK(suffix_average(*quad, decay, 1.0 / 8.0).point[0] == decay.iterate(8)[0]);

  config.record = RecordMode::objectives_only;
  Trace bare = run_sgd(*quad, config);
  CHECK_THROWS_AS(suffix_average(*quad, bare, 0.5), Error);
  CHECK_THROWS_AS(suffix_average(*quad, decay, 0.0), Error);
  CHECK_THROWS_AS(suffix_average(*quad, decay, 1.5), Error);
}

TEST_CASE("suffix average obeys Jensen per run") {
  auto svm = make_svm(6, 30, 5.0, 1.0, 0.1, 3);
  RunConfig config;
  config.schedule = strong_schedule(64, 0.1);
  config.seed = 77;
  config.record = RecordMode::full_iterates;
  Trace trace = run_sgd(*svm, config);
  SuffixAverage avg = suffix_average(*svm, trace, 0.25);
  double window_mean = 0.0;
  const std::uint64_t lo = static_cast<std::uint64_t>(std::ceil(0.75 * 64.0));
  for (std::uint64_t t = lo + 1; t <= 64; ++t) window_mean += trace.objective_values[t - 1];
  window_mean /= static_cast<double>(64 - lo);
  CHECK(avg.value <= window_mean + 1e-12);
}

TEST_CASE("running averages") {
  auto quad = make_pure_quadratic();
  RunConfig config;
  config.schedule = flat_schedule(6, 0.0);
  config.x1 = {0.4};
  config.record = RecordMode::full_iterates;
  Trace constant = run_sgd(*quad, config);
  std::vector<double> values = running_average(*quad, constant);
  for (double v : values) CHECK(v == doctest::Approx(0.08).epsilon(1e-15));

  auto svm = make_svm(5, 20, 5.0, 1.0, 0.1, 3);
  config.schedule = strong_schedule(32, 0.1);
  config.x1.clear();
  config.seed = 4;
  Trace trace = run_sgd(*svm, config);
  std::vector<double> run_avg = running_average(*svm, trace);
  CHECK(run_avg[0] == trace.objective_values[0]);
  double prefix = 0.0;
  for (std::uint64_t t = 1; t <= 32; ++t) {
    prefix += trace.objective_values[t - 1];
    CHECK(run_avg[t - 1] <= prefix / static_cast<double>(t) + 1e-12);  // Jensen
  }
}

TEST_CASE("single-seed ensembles reduce to one run") {
  auto abs = make_abs_quadratic();
  RunConfig config;
  config.schedule = strong_schedule(32, 1.0);
  EnsembleSummary ens = run_ensemble(*abs, config, 1, 9, 0.0, 1);
  config.seed = 9;
  Trace trace = run_sgd(*abs, config);
  CHECK(ens.mean_subopt == trace.objective_values);
  for (double se : ens.std_err) CHECK(se == 0.0);
}

TEST_CASE("deterministic problems have zero ensemble spread") {
  auto lasso = make_lasso(6, 3, 10, 0.1, 0.2, 3);
  RunConfig config;
  config.schedule = weak_schedule(32, 1.0);
  EnsembleSummary ens = run_ensemble(*lasso, config, 4, 0, 0.0, 1);
  for (double se : ens.std_err) CHECK(se == 0.0);
}

TEST_CASE("ensembles are bitwise identical across thread counts") {
  auto svm = make_svm(6, 30, 5.0, 1.0, 0.1, 3);
  RunConfig config;
  config.schedule = strong_schedule(64, 0.1);
  EnsembleSummary one = run_ensemble(*svm, config, 17, 3, 0.0, 1);
  EnsembleSummary four = run_ensemble(*svm, config, 17, 3, 0.0, 4);
  EnsembleSummary three = run_ensemble(*svm, config, 17, 3, 0.0, 3);
  CHECK(one.mean_subopt == four.mean_subopt);
  CHECK(one.std_err == four.std_err);
  CHECK(one.mean_subopt == three.mean_subopt);
}

TEST_CASE("ensemble errors carry the offending seed") {
  auto svm = make_svm(6, 20, 5.0, 1.0, 0.1, 3);
  RunConfig config;
  config.schedule = flat_schedule(8, 0.1);
  config.x1 = {1.0, 2.0};  // wrong dimension
  try {
    run_ensemble(*svm, config, 3, 41, 0.0, 1);
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("seed 41") != std::string::npos);
  }
}

TEST_CASE("suboptimality stays above the noise floor") {
  auto svm = make_svm(8, 40, 5.0, 1.0, 0.1, 3);
  const double f_star = reference_optimum(*svm, 1 << 14);
  RunConfig config;
  config.schedule = strong_schedule(128, 0.1);
  EnsembleSummary ens = run_ensemble(*svm, config, 12, 0, f_star, 1);
  for (std::uint64_t t = 1; t <= 128; ++t)
    CHECK(ens.mean_subopt[t - 1] >= -3.0 * ens.std_err[t - 1] - 1e-12);
}
