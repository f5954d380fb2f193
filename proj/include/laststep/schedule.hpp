#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace laststep {

// Phase boundaries T_0 < T_1 < ... < T_{k+1} that split {1..T} into
// geometrically shrinking tail intervals (T_i, T_{i+1}]. The last two
// intervals are the singletons {T-1 .. } and {T}.
struct Breakpoints {
  std::uint64_t horizon = 0;          // T
  std::uint32_t k = 0;                // number of halvings, smallest i with T*2^-i <= 1
  std::vector<std::uint64_t> points;  // T_0..T_{k+1}, size k+2

  // i such that points[i] < t <= points[i+1], for 1 <= t <= T
  std::uint32_t phase_of(std::uint64_t t) const;
};

Breakpoints compute_breakpoints(std::uint64_t horizon);

enum class Family {
  constant,      // C / sqrt(T)
  inv_sqrt_t,    // C / sqrt(t)
  harmonic,      // 1 / (lambda t)
  weak_modified,
  strong_modified,
  custom,
};

const char* family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);
bool family_is_modified(Family f);

struct StepSchedule {
  std::uint64_t horizon = 0;
  Family family = Family::custom;
  double scale = 0.0;   // C for constant / inv_sqrt_t / weak_modified
  double lambda = 0.0;  // modulus for harmonic / strong_modified
  std::vector<double> alpha;  // alpha[t-1] is the step applied at iteration t

  double at(std::uint64_t t) const { return alpha[t - 1]; }
  // phase index of t for modified families, -1 otherwise
  std::int32_t phase_of(std::uint64_t t) const;
};

// Baselines: constant C/sqrt(T), inv_sqrt_t C/sqrt(t), harmonic 1/(lambda t).
StepSchedule standard_schedule(Family family, std::uint64_t horizon, double scale, double lambda);

// alpha_t = C * 2^-i / sqrt(T) on each phase (T_i, T_{i+1}]
StepSchedule weak_schedule(std::uint64_t horizon, double scale);

// alpha_t = 2^-i / (lambda t) on each phase
StepSchedule strong_schedule(std::uint64_t horizon, double lambda);

// General halving modification alpha_t = 2^-i * gamma_t. The base must be
// nonincreasing and at least `horizon` long.
StepSchedule modify_schedule(const StepSchedule& gamma, std::uint64_t horizon);

struct DecayProfile {
  double beta = 1.0;           // min over 2t <= T of gamma_{2t}/gamma_t, clamped to (0, 1]
  bool is_decreasing = false;  // gamma_{t+1} <= gamma_t for all t
};

DecayProfile estimate_decay_constant(std::span<const double> gamma);
inline DecayProfile estimate_decay_constant(const StepSchedule& s) {
  return estimate_decay_constant(std::span<const double>(s.alpha));
}

}  // namespace laststep
