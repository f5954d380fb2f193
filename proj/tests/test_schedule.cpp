#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "laststep/errors.hpp"
#include "laststep/schedule.hpp"

using namespace laststep;

namespace {

// independent evaluation of the breakpoint definition in floating point
std::vector<std::uint64_t> breakpoints_oracle(std::uint64_t horizon, std::uint32_t& k_out) {
  const double T = static_cast<double>(horizon);
  std::uint32_t k = 0;
  while (T * std::pow(2.0, -static_cast<double>(k)) > 1.0) ++k;
  std::vector<std::uint64_t> points;
  for (std::uint32_t i = 0; i <= k; ++i)
    points.push_back(horizon - static_cast<std::uint64_t>(
                                   std::ceil(T * std::pow(2.0, -static_cast<double>(i)))));
  points.push_back(horizon);
  k_out = k;
  return points;
}

void check_breakpoint_invariants(const Breakpoints& bp) {
  REQUIRE(bp.points.size() == bp.k + 2);
  CHECK(bp.points.front() == 0);
  CHECK(bp.points[bp.k] == bp.horizon - 1);
  CHECK(bp.points.back() == bp.horizon);
  for (std::size_t i = 0; i + 1 < bp.points.size(); ++i)
    CHECK(bp.points[i] < bp.points[i + 1]);
  for (std::uint32_t i = 0; i + 1 <= bp.k; ++i)
    CHECK(4 * (bp.points[i + 2] - bp.points[i + 1]) >= bp.points[i + 1] - bp.points[i]);
}

}  // namespace

TEST_CASE("breakpoints match the definition on small horizons") {
  Breakpoints bp4 = compute_breakpoints(4);
  CHECK(bp4.k == 2);
  CHECK(bp4.points == std::vector<std::uint64_t>{0, 2, 3, 4});

  Breakpoints bp8 = compute_breakpoints(8);
  CHECK(bp8.k == 3);
  CHECK(bp8.points == std::vector<std::uint64_t>{0, 4, 6, 7, 8});

  Breakpoints bp10 = compute_breakpoints(10);
  CHECK(bp10.k == 4);
  CHECK(bp10.points == std::vector<std::uint64_t>{0, 5, 7, 8, 9, 10});
  CHECK(bp10.points[1] == 5);  // T_1 = T/2
}

TEST_CASE("breakpoints agree with the floating-point oracle") {
  for (std::uint64_t t : {4ull, 5ull, 6ull, 7ull, 31ull, 100ull, 1023ull, 1024ull, 1025ull,
                          123456ull}) {
    std::uint32_t k = 0;
    auto expect = breakpoints_oracle(t, k);
    Breakpoints bp = compute_breakpoints(t);
    CHECK(bp.k == k);
    CHECK(bp.points == expect);
  }
}

TEST_CASE("breakpoint invariants hold on a dense sweep") {
  for (std::uint64_t t = 4; t <= 512; ++t) check_breakpoint_invariants(compute_breakpoints(t));
  for (std::uint32_t e = 10; e <= 20; ++e)
    check_breakpoint_invariants(compute_breakpoints(std::uint64_t(1) << e));
}

TEST_CASE("breakpoints reject tiny horizons") {
  CHECK_THROWS_AS(compute_breakpoints(3), Error);
  CHECK_THROWS_AS(compute_breakpoints(0), Error);
}

TEST_CASE("phase lookup walks the half-open intervals") {
  Breakpoints bp = compute_breakpoints(8);  // [0,4,6,7,8]
  CHECK(bp.phase_of(1) == 0);
  CHECK(bp.phase_of(4) == 0);
  CHECK(bp.phase_of(5) == 1);
  CHECK(bp.phase_of(6) == 1);
  CHECK(bp.phase_of(7) == 2);
  CHECK(bp.phase_of(8) == 3);
}

TEST_CASE("weak schedule values") {
  StepSchedule s = weak_schedule(8, 2.0);
  for (std::uint64_t t = 1; t <= 4; ++t)
    CHECK(s.at(t) == doctest::Approx(2.0 / std::sqrt(8.0)).epsilon(1e-15));
  CHECK(s.at(8) == doctest::Approx(2.0 * 0.125 / std::sqrt(8.0)).epsilon(1e-15));
  CHECK(s.at(8) == doctest::Approx(0.0883883476483184).epsilon(1e-12));

  StepSchedule s4 = weak_schedule(4, 1.0);
  CHECK(s4.alpha == std::vector<double>{0.5, 0.5, 0.25, 0.125});
}

TEST_CASE("strong schedule values") {
  StepSchedule s4 = strong_schedule(4, 1.0);
  CHECK(s4.at(1) == 1.0);
  CHECK(s4.at(2) == 0.5);
  CHECK(s4.at(3) == doctest::Approx(0.5 / 3.0).epsilon(1e-15));
  CHECK(s4.at(4) == 0.0625);

  CHECK(strong_schedule(8, 2.0).at(5) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("strong schedule is the modification of the harmonic base") {
  for (std::uint64_t t_end : {4ull, 16ull, 100ull}) {
    for (double lam : {0.5, 1.0, 2.0}) {
      StepSchedule direct = strong_schedule(t_end, lam);
      StepSchedule via =
          modify_schedule(standard_schedule(Family::harmonic, t_end, 0.0, lam), t_end);
      CHECK(via.family == Family::strong_modified);
      for (std::uint64_t t = 1; t <= t_end; ++t) CHECK(direct.at(t) == via.at(t));
    }
  }
}

TEST_CASE("weak schedule is the modification of the constant base") {
  StepSchedule direct = weak_schedule(32, 4.0);
  StepSchedule via = modify_schedule(standard_schedule(Family::constant, 32, 4.0, 0.0), 32);
  CHECK(via.family == Family::weak_modified);
  for (std::uint64_t t = 1; t <= 32; ++t) CHECK(direct.at(t) == via.at(t));
}

TEST_CASE("modification of an all-ones base") {
  StepSchedule base;
  base.horizon = 4;
  base.family = Family::custom;
  base.alpha = {1.0, 1.0, 1.0, 1.0};
  StepSchedule mod = modify_schedule(base, 4);
  CHECK(mod.alpha == std::vector<double>{1.0, 1.0, 0.5, 0.25});
  CHECK(mod.family == Family::custom);
}

TEST_CASE("modification rejects increasing bases") {
  StepSchedule base;
  base.horizon = 4;
  base.family = Family::custom;
  base.alpha = {1.0, 1.0, 1.1, 1.0};
  CHECK_THROWS_AS(modify_schedule(base, 4), Error);
}

TEST_CASE("modification keeps the per-phase structure when applied twice") {
  StepSchedule once = weak_schedule(64, 1.0);
  StepSchedule twice = modify_schedule(once, 64);
  Breakpoints bp = compute_breakpoints(64);
  for (std::uint64_t t = 1; t <= 64; ++t) {
    const double factor = std::pow(2.0, -static_cast<double>(bp.phase_of(t)));
    CHECK(twice.at(t) == doctest::Approx(factor * once.at(t)).epsilon(1e-15));
  }
}

TEST_CASE("decay constants of the named bases") {
  std::vector<double> constant(100, 0.7);
  CHECK(estimate_decay_constant(constant).beta == 1.0);
  CHECK(estimate_decay_constant(constant).is_decreasing);

  std::vector<double> harmonic(100), inv_sqrt(100), increasing(100);
  for (int t = 1; t <= 100; ++t) {
    harmonic[t - 1] = 1.0 / t;
    inv_sqrt[t - 1] = 1.0 / std::sqrt(static_cast<double>(t));
    increasing[t - 1] = t;
  }
  CHECK(estimate_decay_constant(harmonic).beta == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(estimate_decay_constant(inv_sqrt).beta ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(estimate_decay_constant(increasing).beta == 1.0);  // clamped
  CHECK_FALSE(estimate_decay_constant(increasing).is_decreasing);
}

TEST_CASE("standard schedules") {
  StepSchedule h = standard_schedule(Family::harmonic, 3, 0.0, 1.0);
  CHECK(h.at(1) == 1.0);
  CHECK(h.at(2) == 0.5);
  CHECK(h.at(3) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  StepSchedule c = standard_schedule(Family::constant, 3, 3.0, 0.0);
  for (std::uint64_t t = 1; t <= 3; ++t)
    CHECK(c.at(t) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));

  StepSchedule i = standard_schedule(Family::inv_sqrt_t, 4, 1.0, 0.0);
  CHECK(i.at(1) == 1.0);
  CHECK(i.at(2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(i.at(3) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-15));
  CHECK(i.at(4) == 0.5);

  CHECK_THROWS_AS(standard_schedule(Family::weak_modified, 4, 1.0, 1.0), Error);
  CHECK_THROWS_AS(standard_schedule(Family::constant, 4, -1.0, 0.0), Error);
  CHECK_THROWS_AS(standard_schedule(Family::harmonic, 4, 0.0, 0.0), Error);
}

TEST_CASE("last entries shrink at the promised rate") {
  for (std::uint64_t t_end : {8ull, 100ull, 1024ull, 4097ull}) {
    const double tt = static_cast<double>(t_end);
    CHECK(weak_schedule(t_end, 3.0).at(t_end) <= 2.0 * 3.0 / std::pow(tt, 1.5) + 1e-18);
    CHECK(strong_schedule(t_end, 0.7).at(t_end) <= 4.0 / (0.7 * tt * tt) + 1e-18);
  }
}

TEST_CASE("every schedule entry is positive and finite") {
  for (const StepSchedule& s :
       {weak_schedule(100, 0.3), strong_schedule(100, 2.0),
        standard_schedule(Family::inv_sqrt_t, 100, 1.0, 0.0)}) {
    for (double a : s.alpha) {
      CHECK(a > 0.0);
      CHECK(std::isfinite(a));
    }
  }
}
