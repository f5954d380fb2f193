#include "laststep/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "laststep/errors.hpp"

namespace laststep {

std::uint32_t Breakpoints::phase_of(std::uint64_t t) const {
  // first point >= t, so points[i] < t <= points[i+1]
  auto it = std::lower_bound(points.begin(), points.end(), t);
  return static_cast<std::uint32_t>(it - points.begin()) - 1;
}

Breakpoints compute_breakpoints(std::uint64_t horizon) {
  if (horizon < 4)
    fail(errc::horizon_too_small, "horizon must be at least 4, got " + std::to_string(horizon));

  std::uint32_t k = 0;
  while ((static_cast<std::uint64_t>(1) << k) < horizon) ++k;

  Breakpoints bp;
  bp.horizon = horizon;
  bp.k = k;
  bp.points.resize(k + 2);
  for (std::uint32_t i = 0; i <= k; ++i) {
    // T - ceil(T * 2^-i)
    std::uint64_t pow2 = static_cast<std::uint64_t>(1) << i;
    bp.points[i] = horizon - (horizon + pow2 - 1) / pow2;
  }
  bp.points[k + 1] = horizon;
  return bp;
}

const char* family_name(Family f) {
  switch (f) {
    case Family::constant: return "constant";
    case Family::inv_sqrt_t: return "inv_sqrt_t";
    case Family::harmonic: return "harmonic";
    case Family::weak_modified: return "weak_modified";
    case Family::strong_modified: return "strong_modified";
    case Family::custom: return "custom";
  }
  return "custom";
}

std::optional<Family> family_from_name(std::string_view name) {
  if (name == "constant") return Family::constant;
  if (name == "inv_sqrt_t") return Family::inv_sqrt_t;
  if (name == "harmonic") return Family::harmonic;
  if (name == "weak_modified") return Family::weak_modified;
  if (name == "strong_modified") return Family::strong_modified;
  if (name == "custom") return Family::custom;
  return std::nullopt;
}

bool family_is_modified(Family f) {
  return f == Family::weak_modified || f == Family::strong_modified || f == Family::custom;
}

std::int32_t StepSchedule::phase_of(std::uint64_t t) const {
  if (!family_is_modified(family)) return -1;
  return static_cast<std::int32_t>(compute_breakpoints(horizon).phase_of(t));
}

namespace {

void check_positive_scale(double scale) {
  if (!(scale > 0.0)) fail(errc::nonpositive_scale, "scale C must be positive");
}

void check_positive_modulus(double lambda) {
  if (!(lambda > 0.0)) fail(errc::nonpositive_modulus, "strong-convexity modulus must be positive");
}

// apply alpha_t = 2^-i * gamma(t) over the phases of bp
std::vector<double> apply_halving(const Breakpoints& bp, const std::vector<double>& gamma) {
  std::vector<double> alpha(bp.horizon);
  double factor = 1.0;
  for (std::uint32_t i = 0; i <= bp.k; ++i) {
    for (std::uint64_t t = bp.points[i] + 1; t <= bp.points[i + 1]; ++t)
      alpha[t - 1] = factor * gamma[t - 1];
    factor *= 0.5;
  }
  return alpha;
}

}  // namespace

StepSchedule standard_schedule(Family family, std::uint64_t horizon, double scale, double lambda) {
  if (horizon < 1) fail(errc::horizon_too_small, "horizon must be at least 1");
  StepSchedule s;
  s.horizon = horizon;
  s.family = family;
  s.alpha.resize(horizon);
  switch (family) {
    case Family::constant: {
      check_positive_scale(scale);
      s.scale = scale;
      double v = scale / std::sqrt(static_cast<double>(horizon));
      std::fill(s.alpha.begin(), s.alpha.end(), v);
      break;
    }
    case Family::inv_sqrt_t: {
      check_positive_scale(scale);
      s.scale = scale;
      for (std::uint64_t t = 1; t <= horizon; ++t)
        s.alpha[t - 1] = scale / std::sqrt(static_cast<double>(t));
      break;
    }
    case Family::harmonic: {
      check_positive_modulus(lambda);
      s.lambda = lambda;
      for (std::uint64_t t = 1; t <= horizon; ++t)
        s.alpha[t - 1] = 1.0 / (lambda * static_cast<double>(t));
      break;
    }
    default:
      fail(errc::unknown_family, std::string("not a standard family: ") + family_name(family));
  }
  return s;
}

StepSchedule weak_schedule(std::uint64_t horizon, double scale) {
  check_positive_scale(scale);
  Breakpoints bp = compute_breakpoints(horizon);
  StepSchedule s;
  s.horizon = horizon;
  s.family = Family::weak_modified;
  s.scale = scale;
  std::vector<double> base(horizon, scale / std::sqrt(static_cast<double>(horizon)));
  s.alpha = apply_halving(bp, base);
  return s;
}

StepSchedule strong_schedule(std::uint64_t horizon, double lambda) {
  check_positive_modulus(lambda);
  Breakpoints bp = compute_breakpoints(horizon);
  StepSchedule s;
  s.horizon = horizon;
  s.family = Family::strong_modified;
  s.lambda = lambda;
  std::vector<double> base(horizon);
  for (std::uint64_t t = 1; t <= horizon; ++t) base[t - 1] = 1.0 / (lambda * static_cast<double>(t));
  s.alpha = apply_halving(bp, base);
  return s;
}

StepSchedule modify_schedule(const StepSchedule& gamma, std::uint64_t horizon) {
  if (gamma.alpha.size() < horizon)
    fail(errc::invalid_dimensions, "base schedule shorter than requested horizon");
  for (std::uint64_t t = 1; t + 1 <= horizon; ++t) {
    if (gamma.alpha[t] > gamma.alpha[t - 1])
      fail(errc::not_decreasing,
           "base schedule must be nonincreasing (violated at t=" + std::to_string(t + 1) + ")");
  }
  Breakpoints bp = compute_breakpoints(horizon);
  StepSchedule s;
  s.horizon = horizon;
  switch (gamma.family) {
    case Family::constant: s.family = Family::weak_modified; s.scale = gamma.scale; break;
    case Family::harmonic: s.family = Family::strong_modified; s.lambda = gamma.lambda; break;
    default: s.family = Family::custom; s.scale = gamma.scale; s.lambda = gamma.lambda; break;
  }
  std::vector<double> base(gamma.alpha.begin(), gamma.alpha.begin() + horizon);
  s.alpha = apply_halving(bp, base);
  return s;
}

DecayProfile estimate_decay_constant(std::span<const double> gamma) {
  DecayProfile p;
  const std::size_t n = gamma.size();
  p.is_decreasing = true;
  for (std::size_t t = 0; t + 1 < n; ++t)
    if (gamma[t + 1] > gamma[t]) { p.is_decreasing = false; break; }

  double beta = 1.0;
  for (std::size_t t = 1; 2 * t <= n; ++t)
    beta = std::min(beta, gamma[2 * t - 1] / gamma[t - 1]);
  if (!(beta > 0.0)) beta = std::numeric_limits<double>::min();
  p.beta = std::min(beta, 1.0);
  return p;
}

}  // namespace laststep
