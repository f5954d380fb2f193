#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "laststep/certificates.hpp"
#include "laststep/errors.hpp"
#include "laststep/problem.hpp"
#include "laststep/rng.hpp"

using namespace laststep;

namespace {

// plain double-sum evaluation of the p-mixture, independent of the
// suffix-sum path in the library
double naive_pA(const Trace& trace, const std::vector<double>& p, std::uint64_t t0,
                std::uint64_t t1, const StepSchedule& sched, double G) {
  double out = 0.0;
  for (std::uint64_t l = t0; l <= t1; ++l)
    out += p[l - t0] * deviation_A(trace, l, t0, t1, sched, G);
  return out;
}

StepSchedule flat_schedule(std::uint64_t horizon, double value) {
  StepSchedule s;
  s.horizon = horizon;
  s.family = Family::custom;
  s.alpha.assign(horizon, value);
  return s;
}

}  // namespace

TEST_CASE("weight recursion base case and small values") {
  MartingaleWeights w = martingale_weights(1, 2);
  CHECK(w.at(2) == 1.0 / (2.0 * std::numbers::e));
  CHECK(w.at(2) == doctest::Approx(0.183940).epsilon(1e-5));
  CHECK(w.at(1) == doctest::Approx(0.217774).epsilon(1e-5));
  CHECK(w.at(1) == w.at(2) + w.at(2) * w.at(2));

  for (std::uint64_t r : {5ull, 100ull, 1000000ull}) {
    MartingaleWeights big = martingale_weights(10, 10 + r - 1);
    CHECK(big.at(10 + r - 1) == 1.0 / (std::numbers::e * static_cast<double>(r)));
    double lo = 1e300, hi = -1e300;
    for (double v : big.L) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(lo >= 1.0 / (std::numbers::e * static_cast<double>(r)));
    CHECK(hi <= 1.0 / static_cast<double>(r));
  }
  CHECK_THROWS_AS(martingale_weights(5, 5), Error);
}

TEST_CASE("point-mass transfer keeps all mass at the phase end") {
  Breakpoints bp = compute_breakpoints(16);  // [0,8,12,14,15,16]
  StepSchedule sched = weak_schedule(16, 1.0);
  std::vector<double> q(bp.points[2] - bp.points[1], 0.0);
  q.back() = 1.0;  // point mass at T_2
  TransferDistribution td = transfer_distribution(q, 1, bp, sched);
  CHECK(td.support_lo == 9);
  CHECK(td.support_mid == 12);
  CHECK(td.support_hi == 14);
  CHECK(td.kappa_at(12) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(td.total() == doctest::Approx(1.0).epsilon(1e-12));
  for (std::uint64_t t = 9; t <= 11; ++t) CHECK(td.kappa_at(t) == 0.0);
  for (std::uint64_t t = 13; t <= 14; ++t) CHECK(td.kappa_at(t) == 0.0);
}

TEST_CASE("uniform transfer distribution sums to one") {
  Breakpoints bp = compute_breakpoints(8);  // [0,4,6,7,8]
  StepSchedule sched = weak_schedule(8, 1.0);
  std::vector<double> q(2, 0.5);  // uniform over {5, 6}
  TransferDistribution td = transfer_distribution(q, 1, bp, sched);
  CHECK(std::fabs(td.total() - 1.0) <= 1e-12);
  for (double v : td.kappa) CHECK(v >= 0.0);
  CHECK(td.kappa_at(7) == 0.0);

  // the i = 0 window starts at ceil(T/4)
  std::vector<double> q0(bp.points[1] - 2 + 1, 1.0 / (bp.points[1] - 2 + 1));
  TransferDistribution td0 = transfer_distribution(q0, 0, bp, sched);
  CHECK(td0.support_lo == 2);
  CHECK(std::fabs(td0.total() - 1.0) <= 1e-12);

  CHECK_THROWS_AS(transfer_distribution(q, 3, bp, sched), Error);     // needs T_{i+2}
  std::vector<double> wrong(5, 0.2);
  CHECK_THROWS_AS(transfer_distribution(wrong, 1, bp, sched), Error); // support mismatch
}

TEST_CASE("deviation statistics on a constant trace") {
  Trace trace;
  trace.dim = 1;
  trace.objective_values.assign(32, 2.5);
  StepSchedule sched = flat_schedule(32, 0.1);
  const double G = 3.0;

  MartingaleWeights w = martingale_weights(4, 20);
  double expect = 0.0;
  for (std::uint64_t t = 4; t <= 20; ++t) expect -= w.at(t) * 0.01 * G * G;
  CHECK(deviation_A(trace, 4, 4, 20, sched, G) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(deviation_A(trace, 4, 4, 20, sched, G) < 0.0);

  // single-term sum at l = t1
  CHECK(deviation_A(trace, 20, 4, 20, sched, G) ==
        doctest::Approx(-w.at(20) * 0.01 * G * G).epsilon(1e-12));

  // A* with f_star below the plateau picks up the constant gap
  double expect_star = 0.0;
  for (std::uint64_t t = 4; t <= 20; ++t)
    expect_star += w.at(t) * (2.0 * 0.1 * (2.5 - 1.0) - 0.01 * G * G);
  CHECK(deviation_A_star(trace, 4, 20, sched, G, 1.0) ==
        doctest::Approx(expect_star).epsilon(1e-12));
}

TEST_CASE("suffix-sum mixture matches the double-sum oracle") {
  auto abs = make_abs_quadratic();
  RunConfig config;
  config.schedule = strong_schedule(128, 1.0);
  config.seed = 21;
  Trace trace = run_sgd(*abs, config);

  RngStream rng(5);
  for (std::uint64_t t0 : {2ull, 17ull, 64ull}) {
    const std::uint64_t t1 = 128;
    std::vector<double> p(t1 - t0 + 1);
    double total = 0.0;
    for (double& v : p) total += v = rng.next_unit();
    for (double& v : p) v /= total;
    const double fast = deviation_pA(trace, p, t0, t1, config.schedule, 5.0);
    const double slow = naive_pA(trace, p, t0, t1, config.schedule, 5.0);
    CHECK(fast == doctest::Approx(slow).epsilon(1e-10));
  }
}

TEST_CASE("look-ahead certificate") {
  auto abs = make_abs_quadratic();

  // zero steps: both sides vanish, equality holds
  CheckResult zero = check_lookahead(*abs, flat_schedule(32, 0.0), 8, 32, 50, 1, 1);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.pass);

  CheckResult mc = check_lookahead(*abs, strong_schedule(256, 1.0), 128, 256, 400, 7, 1);
  CHECK(mc.pass);

  auto lasso = make_lasso(20, 10, 30, 0.1, 0.2, 3);
  StepSchedule weak = weak_schedule(256, lasso->diameter() / lasso->lipschitz_bound());
  CheckResult exact = check_lookahead(*lasso, weak, 64, 256, 999, 0, 1);
  CHECK(exact.pass);
  CHECK(exact.params.find("seeds=1") != std::string::npos);  // deterministic collapses to one run

  CHECK_THROWS_AS(check_lookahead(*abs, strong_schedule(16, 1.0), 1, 8, 10, 0, 1), Error);
}

TEST_CASE("tail certificate holds on a short adversarial run") {
  auto abs = make_abs_quadratic();
  StepSchedule sched = weak_schedule(256, 0.4);
  std::vector<double> grid{0.5, 1.0, 2.0};
  CertificateReport rows = check_tail(*abs, sched, 129, 256, grid, 500, 3, 1);
  CHECK(rows.size() == 6);
  for (const auto& row : rows) CHECK(row.pass);
}

TEST_CASE("phase argmins") {
  Breakpoints bp = compute_breakpoints(16);  // [0,8,12,14,15,16]
  EnsembleSummary ens;
  ens.n_seeds = 1;
  ens.mean_subopt.resize(16);
  ens.std_err.assign(16, 0.0);
  for (std::uint64_t t = 1; t <= 16; ++t)
    ens.mean_subopt[t - 1] = 1.0 / static_cast<double>(t);  // strictly decreasing
  std::vector<std::uint64_t> tau = phase_argmins(ens, bp);
  REQUIRE(tau.size() == bp.k + 2);
  CHECK(tau[0] == bp.points[1]);
  for (std::uint32_t i = 1; i <= bp.k; ++i) CHECK(tau[i] == bp.points[i + 1]);
  CHECK(tau.back() == 16);

  // ties resolve to the smallest t
  std::fill(ens.mean_subopt.begin(), ens.mean_subopt.end(), 1.0);
  tau = phase_argmins(ens, bp);
  CHECK(tau[0] == 4);  // ceil(16/4)
  for (std::uint32_t i = 1; i <= bp.k; ++i) CHECK(tau[i] == bp.points[i] + 1);
  CHECK(tau.back() == 16);
}

TEST_CASE("transfer certificate on the adversarial scalar problem") {
  auto abs = make_abs_quadratic();
  StepSchedule base = standard_schedule(Family::harmonic, 512, 0.0, 1.0);
  CertificateReport rows = check_transfer(*abs, base, 300, 11, 1);
  Breakpoints bp = compute_breakpoints(512);
  CHECK(rows.size() == bp.k + 1);
  for (const auto& row : rows) CHECK(row.pass);
  CHECK(rows[0].params.find("beta=0.5") != std::string::npos);
}

TEST_CASE("exact suites at reduced scale") {
  CertificateReport bps = breakpoints_suite(256, 12);
  CHECK(bps.size() == 4);
  CHECK(all_pass(bps));

  const std::uint64_t ranges[] = {2, 10, 1000};
  CertificateReport ws = weights_suite(std::span<const std::uint64_t>(ranges, 3));
  CHECK(all_pass(ws));

  CertificateReport ks = kappa_suite(100, 5);
  CHECK(all_pass(ks));
  CHECK(ks.size() == 4);
}
