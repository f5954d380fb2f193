#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laststep/rng.hpp"

namespace laststep {

// A constrained convex objective with a bounded stochastic subgradient
// oracle. Instances are immutable after construction and shareable across
// threads; randomness lives entirely in the caller-owned stream.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual const char* kind() const = 0;
  virtual std::size_t dim() const = 0;
  virtual double objective(std::span<const double> x) const = 0;
  // unbiased stochastic subgradient, ||g|| <= lipschitz_bound() almost surely
  virtual void stochastic_subgradient(std::span<const double> x, RngStream& rng,
                                      std::span<double> g) const = 0;
  // the oracle's mean, itself a subgradient; drives the deterministic GD path
  virtual void mean_subgradient(std::span<const double> x, std::span<double> g) const = 0;
  virtual void project(std::span<double> x) const = 0;
  virtual double lipschitz_bound() const = 0;  // G
  virtual double diameter() const = 0;         // D
  virtual double strong_convexity() const = 0; // lambda; 0 when merely convex
  // true when the stochastic oracle coincides with its mean (plain GD)
  virtual bool deterministic_oracle() const { return false; }
  virtual std::optional<double> known_optimum() const { return std::nullopt; }
  virtual std::vector<double> start_point() const;  // default: projected origin
  virtual std::string params_json() const = 0;

  // dataset view for serialization; empty for synthetic scalar problems
  virtual std::size_t sample_count() const { return 0; }
  virtual std::span<const double> data_matrix() const { return {}; }  // sample_count x dim
  virtual std::span<const double> data_labels() const { return {}; }
};

struct LassoData {
  std::size_t n = 0, d = 0;
  std::vector<double> A;       // row-major n x d
  std::vector<double> b;       // n
  std::vector<double> x_true;  // d, s entries of +-1
  double sigma = 0.0;
  double reg = 0.0;
  std::uint64_t seed = 0;
};

struct SvmData {
  std::size_t n = 0, d = 0;
  std::vector<double> A;  // row-major n x d, rows ~ N(0, sigma^2 I)
  std::vector<double> b;  // +-1 labels, b_i = sgn(a_i(1) + z_i)
  double sigma = 0.0;
  double eta = 0.0;
  double reg = 0.0;
  std::uint64_t seed = 0;
};

LassoData gen_lasso_data(std::size_t d, std::size_t s, std::size_t n, double sigma, double reg,
                         std::uint64_t seed);
SvmData gen_svm_data(std::size_t d, std::size_t n, double sigma, double eta, double reg,
                     std::uint64_t seed);

// radius <= 0 picks the default feasible ball (10*||x_true|| for lasso, 10 for svm)
std::unique_ptr<Problem> make_lasso(std::size_t d, std::size_t s, std::size_t n, double sigma,
                                    double reg, std::uint64_t seed, double radius = 0.0);
std::unique_ptr<Problem> make_lasso(LassoData data, double radius = 0.0);
std::unique_ptr<Problem> make_svm(std::size_t d, std::size_t n, double sigma, double eta,
                                  double reg, std::uint64_t seed, double radius = 0.0);
std::unique_ptr<Problem> make_svm(SvmData data, double radius = 0.0);

// F(x) = |x| + x^2/2 on [-1,1]; oracle sgn(x) + x + 3*rademacher; G=5, lambda=1
std::unique_ptr<Problem> make_abs_quadratic();
// F(x) = x^2/2 on [-1,1]; oracle x + rademacher
std::unique_ptr<Problem> make_pure_quadratic();

// Rescales a mu-strongly-convex, G-Lipschitz problem to modulus 1 and
// Lipschitz bound 5: F0(x) = (25 mu / G^2) F(G x / (5 mu)), D0 = 5 mu D / G.
std::unique_ptr<Problem> make_rescaled(std::shared_ptr<const Problem> inner);

void project_l2_ball(std::span<double> x, double radius);

// Deterministic projected subgradient descent with the halving-modified
// schedule (strong flavor when the problem is strongly convex, weak with
// C = D/G otherwise); returns the smallest objective value seen.
double reference_optimum(const Problem& problem, std::uint64_t budget,
                         std::span<const double> x1 = {});

// known_optimum() when available, otherwise reference_optimum
double resolve_optimum(const Problem& problem, std::uint64_t budget);

}  // namespace laststep
