#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "laststep/errors.hpp"
#include "laststep/problem.hpp"
#include "laststep/rng.hpp"

using namespace laststep;

namespace {

double norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// random point in the problem's feasible ball
std::vector<double> random_feasible(const Problem& p, RngStream& rng) {
  std::vector<double> x(p.dim());
  for (double& v : x) v = rng.next_normal() * p.diameter();
  p.project(std::span<double>(x));
  return x;
}

}  // namespace

TEST_CASE("l2 ball projection") {
  std::vector<double> inside{3.0, 4.0};
  project_l2_ball(std::span<double>(inside), 5.0);
  CHECK(inside == std::vector<double>{3.0, 4.0});

  std::vector<double> outside{3.0, 4.0};
  project_l2_ball(std::span<double>(outside), 1.0);
  CHECK(outside[0] == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(outside[1] == doctest::Approx(0.8).epsilon(1e-15));

  std::vector<double> once{-7.0, 2.5, 0.1};
  project_l2_ball(std::span<double>(once), 2.0);
  std::vector<double> twice = once;
  project_l2_ball(std::span<double>(twice), 2.0);
  CHECK(once == twice);
}

TEST_CASE("lasso reference configuration constructs") {
  auto p = make_lasso(100, 60, 80, 0.1, 0.2, 7);
  CHECK(p->dim() == 100);
  CHECK(p->strong_convexity() == 0.0);
  CHECK(p->lipschitz_bound() > 0.0);
  CHECK(p->diameter() > 0.0);
  CHECK(p->deterministic_oracle());
  CHECK(p->sample_count() == 80);
}

TEST_CASE("one-dimensional lasso objective at the truth") {
  auto p = make_lasso(1, 1, 1, 0.0, 1.0, 3);
  // zero noise: b = a * x_true, so only the l1 term survives at x_true
  auto data = gen_lasso_data(1, 1, 1, 0.0, 1.0, 3);
  CHECK(p->objective(std::span<const double>(data.x_true)) ==
        doctest::Approx(std::fabs(data.x_true[0])).epsilon(1e-12));
}

TEST_CASE("lasso subgradient at zero uses the flat l1 tie-break") {
  auto data = gen_lasso_data(5, 2, 4, 0.1, 0.3, 11);
  auto p = make_lasso(data);
  std::vector<double> zero(5, 0.0), g(5);
  p->mean_subgradient(std::span<const double>(zero), std::span<double>(g));
  for (std::size_t j = 0; j < 5; ++j) {
    double expect = 0.0;  // (2/n) A^T (A*0 - b)
    for (std::size_t i = 0; i < 4; ++i) expect += 2.0 * data.A[i * 5 + j] * (0.0 - data.b[i]);
    expect /= 4.0;
    CHECK(g[j] == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("svm reference configuration constructs") {
  auto p = make_svm(30, 500, 5.0, 1.0, 0.1, 7);
  CHECK(p->dim() == 30);
  CHECK(p->strong_convexity() == 0.1);
  CHECK(p->diameter() == 20.0);
  CHECK_FALSE(p->deterministic_oracle());

  std::vector<double> zero(30, 0.0);
  CHECK(p->objective(std::span<const double>(zero)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("svm stochastic subgradient with an inactive hinge") {
  SvmData data;
  data.n = 1;
  data.d = 2;
  data.A = {2.0, 0.0};
  data.b = {1.0};
  data.sigma = data.eta = 1.0;
  data.reg = 0.5;
  auto p = make_svm(std::move(data), 3.0);
  std::vector<double> x{1.0, 1.0}, g(2);  // b <a,x> = 2 > 1
  RngStream rng(0);
  p->stochastic_subgradient(std::span<const double>(x), rng, std::span<double>(g));
  CHECK(g[0] == 0.5);
  CHECK(g[1] == 0.5);
}

TEST_CASE("scalar adversarial problems") {
  auto abs = make_abs_quadratic();
  std::vector<double> x{0.5};
  CHECK(abs->objective(std::span<const double>(x)) == 0.625);
  CHECK(abs->lipschitz_bound() == 5.0);
  CHECK(abs->strong_convexity() == 1.0);
  CHECK(abs->known_optimum() == 0.0);
  CHECK(abs->start_point() == std::vector<double>{1.0});

  auto quad = make_pure_quadratic();
  x[0] = 1.0;
  CHECK(quad->objective(std::span<const double>(x)) == 0.5);
  RngStream rng(5);
  std::vector<double> g(1), zero{0.0};
  for (int i = 0; i < 50; ++i) {
    quad->stochastic_subgradient(std::span<const double>(zero), rng, std::span<double>(g));
    CHECK(std::fabs(g[0]) == 1.0);
  }
}

TEST_CASE("oracle draws stay within the Lipschitz bound") {
  RngStream point_rng(101);
  struct Case {
    std::unique_ptr<Problem> problem;
    int n_draws;
  };
  Case cases[] = {{make_abs_quadratic(), 100000},
                  {make_pure_quadratic(), 100000},
                  {make_svm(30, 500, 5.0, 1.0, 0.1, 7), 100000},
                  {make_lasso(20, 10, 30, 0.1, 0.2, 7), 20000},
                  {make_lasso(100, 60, 80, 0.1, 0.2, 7), 2000}};
  for (const auto& c : cases) {
    RngStream draw_rng(202);
    const double g_bound = c.problem->lipschitz_bound();
    std::vector<double> g(c.problem->dim());
    for (int i = 0; i < c.n_draws; ++i) {
      auto x = random_feasible(*c.problem, point_rng);
      c.problem->stochastic_subgradient(std::span<const double>(x), draw_rng,
                                        std::span<double>(g));
      CHECK(norm(g) <= g_bound + 1e-12);
    }
  }
}

TEST_CASE("scalar oracles are unbiased") {
  const int n = 100000;
  const double slack = 3.0 * 3.0 / std::sqrt(static_cast<double>(n));
  for (double x0 : {-0.8, 0.0, 0.3}) {
    auto abs = make_abs_quadratic();
    RngStream rng(7);
    std::vector<double> x{x0}, g(1);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
      abs->stochastic_subgradient(std::span<const double>(x), rng, std::span<double>(g));
      mean += g[0];
    }
    mean /= n;
    const double sgn = x0 > 0 ? 1.0 : (x0 < 0 ? -1.0 : 0.0);
    CHECK(std::fabs(mean - (sgn + x0)) <= slack);

    auto quad = make_pure_quadratic();
    mean = 0.0;
    for (int i = 0; i < n; ++i) {
      quad->stochastic_subgradient(std::span<const double>(x), rng, std::span<double>(g));
      mean += g[0];
    }
    mean /= n;
    CHECK(std::fabs(mean - x0) <= slack);
  }
}

TEST_CASE("objectives are convex along random segments") {
  RngStream rng(31);
  std::unique_ptr<Problem> problems[] = {make_abs_quadratic(), make_pure_quadratic(),
                                         make_svm(10, 50, 5.0, 1.0, 0.1, 7),
                                         make_lasso(10, 5, 20, 0.1, 0.2, 7)};
  for (const auto& p : problems) {
    for (int i = 0; i < 10000; ++i) {
      auto a = random_feasible(*p, rng);
      auto b = random_feasible(*p, rng);
      std::vector<double> mid(p->dim());
      for (std::size_t j = 0; j < mid.size(); ++j) mid[j] = 0.5 * (a[j] + b[j]);
      const double lhs = p->objective(mid);
      const double rhs = 0.5 * (p->objective(std::span<const double>(a)) +
                                p->objective(std::span<const double>(b)));
      CHECK(lhs <= rhs + 1e-10);
    }
  }
}

TEST_CASE("svm objective is reg-strongly convex") {
  auto p = make_svm(10, 50, 5.0, 1.0, 0.1, 7);
  RngStream rng(13);
  std::vector<double> g(10);
  for (int i = 0; i < 2000; ++i) {
    auto x = random_feasible(*p, rng);
    auto y = random_feasible(*p, rng);
    p->mean_subgradient(std::span<const double>(x), std::span<double>(g));
    double inner = 0.0, dist_sq = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
      inner += g[j] * (y[j] - x[j]);
      dist_sq += (y[j] - x[j]) * (y[j] - x[j]);
    }
    CHECK(p->objective(std::span<const double>(y)) >=
          p->objective(std::span<const double>(x)) + inner + 0.05 * dist_sq - 1e-9);
  }
}

TEST_CASE("reference optimum") {
  auto quad = make_pure_quadratic();
  std::vector<double> zero{0.0};
  for (std::uint64_t budget : {1ull, 2ull, 5ull, 100ull})
    CHECK(reference_optimum(*quad, budget, std::span<const double>(zero)) == 0.0);

  auto abs = make_abs_quadratic();
  CHECK(reference_optimum(*abs, 100000) <= 1e-3);

  // one-dimensional lasso has a closed-form soft-threshold optimum
  auto data = gen_lasso_data(1, 1, 6, 0.2, 0.3, 17);
  double q = 0.0, c = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    q += 2.0 * data.A[i] * data.A[i] / 6.0;
    c += 2.0 * data.A[i] * data.b[i] / 6.0;
  }
  const double x_closed =
      std::fabs(c) <= data.reg ? 0.0 : (c > 0 ? (c - data.reg) / q : (c + data.reg) / q);
  auto p = make_lasso(std::move(data));
  std::vector<double> x_star{x_closed};
  const double f_closed = p->objective(std::span<const double>(x_star));
  CHECK(reference_optimum(*p, 1 << 16) == doctest::Approx(f_closed).epsilon(1e-6));
}

TEST_CASE("rescaled problems have modulus one and Lipschitz bound five") {
  auto svm = std::shared_ptr<const Problem>(make_svm(8, 40, 5.0, 1.0, 0.1, 7));
  auto scaled = make_rescaled(svm);
  CHECK(scaled->lipschitz_bound() == 5.0);
  CHECK(scaled->strong_convexity() == 1.0);
  CHECK(scaled->diameter() ==
        doctest::Approx(5.0 * 0.1 * svm->diameter() / svm->lipschitz_bound()).epsilon(1e-12));

  // objective correspondence F0(x) = (25 mu / G^2) F(G x / (5 mu))
  const double g_bound = svm->lipschitz_bound();
  const double mu = svm->strong_convexity();
  RngStream rng(3);
  std::vector<double> g(8);
  for (int i = 0; i < 500; ++i) {
    auto x = random_feasible(*scaled, rng);
    std::vector<double> inner(8);
    for (std::size_t j = 0; j < 8; ++j) inner[j] = g_bound * x[j] / (5.0 * mu);
    CHECK(scaled->objective(std::span<const double>(x)) ==
          doctest::Approx(25.0 * mu / (g_bound * g_bound) *
                          svm->objective(std::span<const double>(inner)))
              .epsilon(1e-10));
    scaled->stochastic_subgradient(std::span<const double>(x), rng, std::span<double>(g));
    CHECK(norm(g) <= 5.0 + 1e-12);
  }
  CHECK_THROWS_AS(make_rescaled(std::shared_ptr<const Problem>(make_lasso(4, 2, 8, 0.1, 0.2, 1))),
                  Error);
}

TEST_CASE("generator rejections") {
  CHECK_THROWS_AS(gen_lasso_data(5, 0, 4, 0.1, 0.2, 1), Error);
  CHECK_THROWS_AS(gen_lasso_data(5, 6, 4, 0.1, 0.2, 1), Error);
  CHECK_THROWS_AS(gen_lasso_data(5, 2, 0, 0.1, 0.2, 1), Error);
  CHECK_THROWS_AS(gen_svm_data(5, 4, 0.0, 1.0, 0.2, 1), Error);
  CHECK_THROWS_AS(gen_svm_data(0, 4, 5.0, 1.0, 0.2, 1), Error);
}

TEST_CASE("data generation is reproducible per seed") {
  auto a = gen_svm_data(6, 20, 5.0, 1.0, 0.1, 42);
  auto b = gen_svm_data(6, 20, 5.0, 1.0, 0.1, 42);
  auto c = gen_svm_data(6, 20, 5.0, 1.0, 0.1, 43);
  CHECK(a.A == b.A);
  CHECK(a.b == b.b);
  CHECK(a.A != c.A);
}
