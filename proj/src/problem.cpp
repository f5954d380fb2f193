#include "laststep/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numeric>

#include "laststep/errors.hpp"
#include "laststep/schedule.hpp"

namespace laststep {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double sgn0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

std::string fmt_params(const char* fmt, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, ap);
  va_end(ap);
  return std::string(buf);
}

// largest singular value of the n x d row-major matrix, by power iteration
// on A^T A with a fixed start; deterministic, slight overshoot is harmless
// since the result only feeds an upper bound.
double spectral_norm(const std::vector<double>& A, std::size_t n, std::size_t d) {
  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> Av(n), w(d);
  double s = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    for (std::size_t i = 0; i < n; ++i)
      Av[i] = dot(std::span(A).subspan(i * d, d), v);
    std::fill(w.begin(), w.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) w[j] += A[i * d + j] * Av[i];
    double nw = norm2(w);
    if (nw == 0.0) return 0.0;
    for (std::size_t j = 0; j < d; ++j) v[j] = w[j] / nw;
    s = std::sqrt(nw);
  }
  return s * 1.0000001;
}

}  // namespace

void project_l2_ball(std::span<double> x, double radius) {
  double n = norm2(x);
  if (n > radius) {
    double scale = radius / n;
    for (double& v : x) v *= scale;
  }
}

std::vector<double> Problem::start_point() const {
  std::vector<double> x(dim(), 0.0);
  project(std::span<double>(x));
  return x;
}

// ---------------------------------------------------------------------------
// Lasso: F(x) = (1/n) sum (<a_i,x> - b_i)^2 + reg ||x||_1, full-batch oracle

LassoData gen_lasso_data(std::size_t d, std::size_t s, std::size_t n, double sigma, double reg,
                         std::uint64_t seed) {
  if (s == 0 || s > d) fail(errc::invalid_sparsity, "need 0 < s <= d");
  if (d == 0 || n == 0) fail(errc::invalid_dimensions, "need d >= 1 and n >= 1");
  if (!(reg > 0.0) || sigma < 0.0) fail(errc::invalid_dimensions, "need reg > 0 and sigma >= 0");

  LassoData data;
  data.n = n;
  data.d = d;
  data.sigma = sigma;
  data.reg = reg;
  data.seed = seed;
  RngStream rng(seed);

  // s coordinates without replacement (Fisher-Yates prefix), entries +-1
  data.x_true.assign(d, 0.0);
  std::vector<std::size_t> idx(d);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < s; ++i)
    std::swap(idx[i], idx[i + rng.next_index(d - i)]);
  for (std::size_t i = 0; i < s; ++i) data.x_true[idx[i]] = rng.next_rademacher();

  data.A.resize(n * d);
  for (double& v : data.A) v = rng.next_normal();
  data.b.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    data.b[i] = dot(std::span(data.A).subspan(i * d, d), data.x_true) + sigma * rng.next_normal();
  return data;
}

namespace {

class LassoProblem final : public Problem {
 public:
  LassoProblem(LassoData data, double radius) : data_(std::move(data)) {
    radius_ = radius > 0.0 ? radius : 10.0 * norm2(data_.x_true);
    double smax = spectral_norm(data_.A, data_.n, data_.d);
    std::vector<double> atb(data_.d, 0.0);
    for (std::size_t i = 0; i < data_.n; ++i)
      for (std::size_t j = 0; j < data_.d; ++j) atb[j] += data_.A[i * data_.d + j] * data_.b[i];
    double n = static_cast<double>(data_.n);
    lipschitz_ = 2.0 / n * (smax * smax * radius_ + norm2(atb)) +
                 data_.reg * std::sqrt(static_cast<double>(data_.d));
  }

  const char* kind() const override { return "lasso"; }
  std::size_t dim() const override { return data_.d; }

  double objective(std::span<const double> x) const override {
    double sq = 0.0;
    for (std::size_t i = 0; i < data_.n; ++i) {
      double r = dot(std::span(data_.A).subspan(i * data_.d, data_.d), x) - data_.b[i];
      sq += r * r;
    }
    double l1 = 0.0;
    for (double v : x) l1 += std::fabs(v);
    return sq / static_cast<double>(data_.n) + data_.reg * l1;
  }

  void mean_subgradient(std::span<const double> x, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < data_.n; ++i) {
      double r = dot(std::span(data_.A).subspan(i * data_.d, data_.d), x) - data_.b[i];
      for (std::size_t j = 0; j < data_.d; ++j) g[j] += 2.0 * r * data_.A[i * data_.d + j];
    }
    double inv_n = 1.0 / static_cast<double>(data_.n);
    for (std::size_t j = 0; j < data_.d; ++j)
      g[j] = g[j] * inv_n + data_.reg * sgn0(x[j]);  // |.| subgradient 0 at 0
  }

  void stochastic_subgradient(std::span<const double> x, RngStream&,
                              std::span<double> g) const override {
    mean_subgradient(x, g);  // the lasso experiment runs plain full-batch GD
  }

  void project(std::span<double> x) const override { project_l2_ball(x, radius_); }
  double lipschitz_bound() const override { return lipschitz_; }
  double diameter() const override { return 2.0 * radius_; }
  double strong_convexity() const override { return 0.0; }
  bool deterministic_oracle() const override { return true; }

  std::string params_json() const override {
    std::size_t s = 0;
    for (double v : data_.x_true) s += v != 0.0;
    return fmt_params(
        "{\"kind\":\"lasso\",\"d\":%zu,\"s\":%zu,\"n\":%zu,\"sigma\":%.17g,\"reg\":%.17g,"
        "\"seed\":%llu,\"radius\":%.17g}",
        data_.d, s, data_.n, data_.sigma, data_.reg,
        static_cast<unsigned long long>(data_.seed), radius_);
  }

  const LassoData& data() const { return data_; }
  std::size_t sample_count() const override { return data_.n; }
  std::span<const double> data_matrix() const override { return data_.A; }
  std::span<const double> data_labels() const override { return data_.b; }

 private:
  LassoData data_;
  double radius_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace

std::unique_ptr<Problem> make_lasso(LassoData data, double radius) {
  return std::make_unique<LassoProblem>(std::move(data), radius);
}

std::unique_ptr<Problem> make_lasso(std::size_t d, std::size_t s, std::size_t n, double sigma,
                                    double reg, std::uint64_t seed, double radius) {
  return make_lasso(gen_lasso_data(d, s, n, sigma, reg, seed), radius);
}

// ---------------------------------------------------------------------------
// SVM: F(x) = (1/n) sum max(0, 1 - b_i <a_i,x>) + (reg/2) ||x||^2

SvmData gen_svm_data(std::size_t d, std::size_t n, double sigma, double eta, double reg,
                     std::uint64_t seed) {
  if (d == 0 || n == 0) fail(errc::invalid_dimensions, "need d >= 1 and n >= 1");
  if (!(sigma > 0.0) || eta < 0.0 || !(reg > 0.0))
    fail(errc::invalid_dimensions, "need sigma > 0, eta >= 0, reg > 0");

  SvmData data;
  data.n = n;
  data.d = d;
  data.sigma = sigma;
  data.eta = eta;
  data.reg = reg;
  data.seed = seed;
  RngStream rng(seed);
  data.A.resize(n * d);
  for (double& v : data.A) v = sigma * rng.next_normal();
  data.b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = data.A[i * d] + eta * rng.next_normal();
    data.b[i] = z >= 0.0 ? 1.0 : -1.0;
  }
  return data;
}

namespace {

class SvmProblem final : public Problem {
 public:
  SvmProblem(SvmData data, double radius) : data_(std::move(data)) {
    radius_ = radius > 0.0 ? radius : 10.0;
    double max_row = 0.0;
    for (std::size_t i = 0; i < data_.n; ++i)
      max_row = std::max(max_row, norm2(std::span(data_.A).subspan(i * data_.d, data_.d)));
    lipschitz_ = max_row + data_.reg * radius_;
  }

  const char* kind() const override { return "svm"; }
  std::size_t dim() const override { return data_.d; }

  double objective(std::span<const double> x) const override {
    double hinge = 0.0;
    for (std::size_t i = 0; i < data_.n; ++i) {
      double m = 1.0 - data_.b[i] * dot(std::span(data_.A).subspan(i * data_.d, data_.d), x);
      if (m > 0.0) hinge += m;
    }
    return hinge / static_cast<double>(data_.n) + 0.5 * data_.reg * dot(x, x);
  }

  void stochastic_subgradient(std::span<const double> x, RngStream& rng,
                              std::span<double> g) const override {
    std::size_t i = rng.next_index(data_.n);
    auto row = std::span(data_.A).subspan(i * data_.d, data_.d);
    bool active = 1.0 - data_.b[i] * dot(row, x) > 0.0;
    for (std::size_t j = 0; j < data_.d; ++j)
      g[j] = data_.reg * x[j] - (active ? data_.b[i] * row[j] : 0.0);
  }

  void mean_subgradient(std::span<const double> x, std::span<double> g) const override {
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i < data_.n; ++i) {
      auto row = std::span(data_.A).subspan(i * data_.d, data_.d);
      if (1.0 - data_.b[i] * dot(row, x) > 0.0)
        for (std::size_t j = 0; j < data_.d; ++j) g[j] -= data_.b[i] * row[j];
    }
    double inv_n = 1.0 / static_cast<double>(data_.n);
    for (std::size_t j = 0; j < data_.d; ++j) g[j] = g[j] * inv_n + data_.reg * x[j];
  }

  void project(std::span<double> x) const override { project_l2_ball(x, radius_); }
  double lipschitz_bound() const override { return lipschitz_; }
  double diameter() const override { return 2.0 * radius_; }
  double strong_convexity() const override { return data_.reg; }

  std::string params_json() const override {
    return fmt_params(
        "{\"kind\":\"svm\",\"d\":%zu,\"n\":%zu,\"sigma\":%.17g,\"eta\":%.17g,\"reg\":%.17g,"
        "\"seed\":%llu,\"radius\":%.17g}",
        data_.d, data_.n, data_.sigma, data_.eta, data_.reg,
        static_cast<unsigned long long>(data_.seed), radius_);
  }

  const SvmData& data() const { return data_; }
  std::size_t sample_count() const override { return data_.n; }
  std::span<const double> data_matrix() const override { return data_.A; }
  std::span<const double> data_labels() const override { return data_.b; }

 private:
  SvmData data_;
  double radius_ = 0.0;
  double lipschitz_ = 0.0;
};

// ---------------------------------------------------------------------------
// Scalar adversarial objectives on [-1, 1]

class AbsQuadraticProblem final : public Problem {
 public:
  const char* kind() const override { return "absquad"; }
  std::size_t dim() const override { return 1; }
  double objective(std::span<const double> x) const override {
    return std::fabs(x[0]) + 0.5 * x[0] * x[0];
  }
  void stochastic_subgradient(std::span<const double> x, RngStream& rng,
                              std::span<double> g) const override {
    g[0] = sgn0(x[0]) + x[0] + 3.0 * rng.next_rademacher();
  }
  void mean_subgradient(std::span<const double> x, std::span<double> g) const override {
    g[0] = sgn0(x[0]) + x[0];
  }
  void project(std::span<double> x) const override { x[0] = std::clamp(x[0], -1.0, 1.0); }
  double lipschitz_bound() const override { return 5.0; }
  double diameter() const override { return 2.0; }
  double strong_convexity() const override { return 1.0; }
  std::optional<double> known_optimum() const override { return 0.0; }
  std::vector<double> start_point() const override { return {1.0}; }
  std::string params_json() const override { return "{\"kind\":\"absquad\"}"; }
};

class PureQuadraticProblem final : public Problem {
 public:
  const char* kind() const override { return "quad"; }
  std::size_t dim() const override { return 1; }
  double objective(std::span<const double> x) const override { return 0.5 * x[0] * x[0]; }
  void stochastic_subgradient(std::span<const double> x, RngStream& rng,
                              std::span<double> g) const override {
    g[0] = x[0] + rng.next_rademacher();
  }
  void mean_subgradient(std::span<const double> x, std::span<double> g) const override {
    g[0] = x[0];
  }
  void project(std::span<double> x) const override { x[0] = std::clamp(x[0], -1.0, 1.0); }
  double lipschitz_bound() const override { return 2.0; }
  double diameter() const override { return 2.0; }
  double strong_convexity() const override { return 1.0; }
  std::optional<double> known_optimum() const override { return 0.0; }
  std::vector<double> start_point() const override { return {1.0}; }
  std::string params_json() const override { return "{\"kind\":\"quad\"}"; }
};

// F0(x) = (25 mu / G^2) F(G x / (5 mu)); iterates correspond via x0 = (5 mu / G) x
class RescaledProblem final : public Problem {
 public:
  explicit RescaledProblem(std::shared_ptr<const Problem> inner) : inner_(std::move(inner)) {
    double mu = inner_->strong_convexity();
    if (!(mu > 0.0)) fail(errc::invalid_dimensions, "rescaling needs a strongly convex problem");
    double g = inner_->lipschitz_bound();
    value_scale_ = 25.0 * mu / (g * g);
    arg_scale_ = g / (5.0 * mu);  // maps rescaled points back to the original domain
  }

  const char* kind() const override { return "rescaled"; }
  std::size_t dim() const override { return inner_->dim(); }

  double objective(std::span<const double> x) const override {
    return value_scale_ * inner_->objective(to_inner(x));
  }
  void stochastic_subgradient(std::span<const double> x, RngStream& rng,
                              std::span<double> g) const override {
    inner_->stochastic_subgradient(to_inner(x), rng, g);
    double s = 5.0 / inner_->lipschitz_bound();
    for (double& v : g) v *= s;
  }
  void mean_subgradient(std::span<const double> x, std::span<double> g) const override {
    inner_->mean_subgradient(to_inner(x), g);
    double s = 5.0 / inner_->lipschitz_bound();
    for (double& v : g) v *= s;
  }
  void project(std::span<double> x) const override {
    std::vector<double> y = to_inner(x);
    inner_->project(std::span<double>(y));
    for (std::size_t j = 0; j < y.size(); ++j) x[j] = y[j] / arg_scale_;
  }
  double lipschitz_bound() const override { return 5.0; }
  double diameter() const override { return inner_->diameter() / arg_scale_; }
  double strong_convexity() const override { return 1.0; }
  std::optional<double> known_optimum() const override {
    if (auto f = inner_->known_optimum()) return value_scale_ * *f;
    return std::nullopt;
  }
  std::vector<double> start_point() const override {
    std::vector<double> x = inner_->start_point();
    for (double& v : x) v /= arg_scale_;
    return x;
  }
  std::string params_json() const override {
    return std::string("{\"kind\":\"rescaled\",\"inner\":") + inner_->params_json() + "}";
  }

 private:
  std::vector<double> to_inner(std::span<const double> x) const {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) v *= arg_scale_;
    return y;
  }

  std::shared_ptr<const Problem> inner_;
  double value_scale_ = 1.0;
  double arg_scale_ = 1.0;
};

}  // namespace

std::unique_ptr<Problem> make_svm(SvmData data, double radius) {
  return std::make_unique<SvmProblem>(std::move(data), radius);
}

std::unique_ptr<Problem> make_svm(std::size_t d, std::size_t n, double sigma, double eta,
                                  double reg, std::uint64_t seed, double radius) {
  return make_svm(gen_svm_data(d, n, sigma, eta, reg, seed), radius);
}

std::unique_ptr<Problem> make_abs_quadratic() { return std::make_unique<AbsQuadraticProblem>(); }
std::unique_ptr<Problem> make_pure_quadratic() { return std::make_unique<PureQuadraticProblem>(); }

std::unique_ptr<Problem> make_rescaled(std::shared_ptr<const Problem> inner) {
  return std::make_unique<RescaledProblem>(std::move(inner));
}

// ---------------------------------------------------------------------------

double reference_optimum(const Problem& problem, std::uint64_t budget,
                         std::span<const double> x1) {
  if (budget < 1) fail(errc::invalid_dimensions, "budget must be at least 1");

  std::vector<double> x;
  if (x1.empty()) {
    x = problem.start_point();
  } else {
    if (x1.size() != problem.dim()) fail(errc::dimension_mismatch, "start point dimension");
    x.assign(x1.begin(), x1.end());
    problem.project(std::span<double>(x));
  }

  double best = problem.objective(x);
  if (budget < 4) return best;

  double lam = problem.strong_convexity();
  StepSchedule sched = lam > 0.0
                           ? strong_schedule(budget, lam)
                           : weak_schedule(budget, problem.diameter() / problem.lipschitz_bound());

  std::vector<double> g(problem.dim());
  for (std::uint64_t t = 1; t < budget; ++t) {
    problem.mean_subgradient(x, std::span<double>(g));
    double a = sched.at(t);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] -= a * g[j];
    problem.project(std::span<double>(x));
    best = std::min(best, problem.objective(x));
  }
  return best;
}

double resolve_optimum(const Problem& problem, std::uint64_t budget) {
  if (auto f = problem.known_optimum()) return *f;
  return reference_optimum(problem, budget);
}

}  // namespace laststep
