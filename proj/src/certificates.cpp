#include "laststep/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "laststep/errors.hpp"
#include "laststep/rng.hpp"

namespace laststep {

namespace {

std::string fmt(const char* f, auto... args) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), f, args...);
  return std::string(buf);
}

}  // namespace

MartingaleWeights martingale_weights(std::uint64_t t0, std::uint64_t t1) {
  if (t0 >= t1) fail(errc::empty_range, "need t0 < t1");
  MartingaleWeights w;
  w.t0 = t0;
  w.t1 = t1;
  const std::uint64_t r = t1 - t0 + 1;
  w.L.resize(r);
  w.L[r - 1] = 1.0 / (std::numbers::e * static_cast<double>(r));
  for (std::uint64_t j = r - 1; j > 0; --j) w.L[j - 1] = w.L[j] + w.L[j] * w.L[j];
  return w;
}

double TransferDistribution::total() const {
  double s = 0.0;
  for (double v : kappa) s += v;
  return s;
}

double TransferDistribution::sigma_at(std::uint64_t t) const {
  double s = 0.0;
  for (std::uint64_t u = support_lo; u <= t; ++u) s += kappa_at(u);
  return s;
}

TransferDistribution transfer_distribution(std::span<const double> q, std::uint32_t phase,
                                           const Breakpoints& bp, const StepSchedule& sched) {
  if (phase >= bp.k) fail(errc::phase_out_of_range, "need phase <= k-1 so T_{i+2} exists");
  if (sched.horizon < bp.horizon)
    fail(errc::invalid_dimensions, "schedule shorter than the breakpoint horizon");

  const std::uint64_t lo = phase == 0 ? (bp.horizon + 3) / 4 : bp.points[phase] + 1;
  const std::uint64_t mid = bp.points[phase + 1];
  const std::uint64_t hi = bp.points[phase + 2];
  if (q.size() != mid - lo + 1)
    fail(errc::support_mismatch,
         fmt("q must have %llu entries, got %zu",
             static_cast<unsigned long long>(mid - lo + 1), q.size()));

  const MartingaleWeights w = martingale_weights(lo, hi);

  // Gamma(t) = sum_{s=t+1..hi} alpha_s L_s, needed for t in [lo-1, mid]
  std::vector<double> gamma_tail(hi - lo + 2);  // gamma_tail[t - (lo-1)]
  gamma_tail[hi - lo + 1] = 0.0;
  for (std::uint64_t t = hi; t >= lo; --t)
    gamma_tail[t - lo] = gamma_tail[t - lo + 1] + sched.at(t) * w.at(t);
  auto gamma_at = [&](std::uint64_t t) { return gamma_tail[t - lo + 1]; };

  TransferDistribution out;
  out.phase = phase;
  out.support_lo = lo;
  out.support_mid = mid;
  out.support_hi = hi;
  out.q.assign(q.begin(), q.end());
  out.kappa.assign(hi - lo + 1, 0.0);

  const double gamma_mid = gamma_at(mid);
  double sigma = 0.0;
  for (std::uint64_t t = lo; t <= mid; ++t) {
    const double gt = gamma_at(t);
    double k = gamma_mid / gt * q[t - lo];
    if (t > lo) k += sched.at(t) * w.at(t) * sigma / gt;
    out.kappa[t - lo] = k;
    sigma += k;
  }
  return out;
}

double deviation_A(const Trace& trace, std::uint64_t l, std::uint64_t t0, std::uint64_t t1,
                   const StepSchedule& sched, double G) {
  if (!(t0 <= l && l <= t1) || t1 > trace.horizon())
    fail(errc::out_of_range, "need t0 <= l <= t1 <= horizon");
  const MartingaleWeights w = martingale_weights(t0, t1);
  const double fl = trace.objective_values[l - 1];
  double a = 0.0;
  for (std::uint64_t t = l; t <= t1; ++t) {
    const double at = sched.at(t);
    a += w.at(t) * (2.0 * at * (trace.objective_values[t - 1] - fl) - at * at * G * G);
  }
  return a;
}

double deviation_A_star(const Trace& trace, std::uint64_t t0, std::uint64_t t1,
                        const StepSchedule& sched, double G, double f_star) {
  if (t0 >= t1 || t1 > trace.horizon()) fail(errc::out_of_range, "need t0 < t1 <= horizon");
  const MartingaleWeights w = martingale_weights(t0, t1);
  double a = 0.0;
  for (std::uint64_t t = t0; t <= t1; ++t) {
    const double at = sched.at(t);
    a += w.at(t) * (2.0 * at * (trace.objective_values[t - 1] - f_star) - at * at * G * G);
  }
  return a;
}

double deviation_pA(const Trace& trace, std::span<const double> p, std::uint64_t t0,
                    std::uint64_t t1, const StepSchedule& sched, double G) {
  if (t0 >= t1 || t1 > trace.horizon()) fail(errc::out_of_range, "need t0 < t1 <= horizon");
  if (p.size() != t1 - t0 + 1) fail(errc::support_mismatch, "p must cover {t0..t1}");
  const MartingaleWeights w = martingale_weights(t0, t1);
  // A(l,t1) = S(l) - 2 F(x_l) W(l) with suffix sums
  //   S(l) = sum_{t>=l} L_t (2 alpha_t F(x_t) - alpha_t^2 G^2),
  //   W(l) = sum_{t>=l} L_t alpha_t.
  double s = 0.0, wsum = 0.0, pa = 0.0;
  for (std::uint64_t l = t1; l >= t0; --l) {
    const double al = sched.at(l);
    const double fl = trace.objective_values[l - 1];
    s += w.at(l) * (2.0 * al * fl - al * al * G * G);
    wsum += w.at(l) * al;
    pa += p[l - t0] * (s - 2.0 * fl * wsum);
    if (l == t0) break;
  }
  return pa;
}

DeviationStats deviation_stats(const Trace& trace, std::span<const double> p, std::uint64_t l,
                               std::uint64_t t0, std::uint64_t t1, const StepSchedule& sched,
                               double G, double f_star) {
  DeviationStats out;
  out.A = deviation_A(trace, l, t0, t1, sched, G);
  out.A_star = deviation_A_star(trace, t0, t1, sched, G, f_star);
  out.pA = deviation_pA(trace, p, t0, t1, sched, G);
  return out;
}

bool all_pass(const CertificateReport& report) {
  for (const auto& row : report)
    if (!row.pass) return false;
  return true;
}

CheckResult make_check(std::string name, std::string params, double lhs, double rhs) {
  CheckResult r;
  r.check = std::move(name);
  r.params = std::move(params);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.pass = lhs <= rhs;
  return r;
}

CheckResult check_lookahead(const Problem& problem, const StepSchedule& sched, std::uint64_t t0,
                            std::uint64_t t1, std::uint32_t n_seeds, std::uint64_t seed0,
                            int threads) {
  if (!(1 < t0 && t0 < t1 && t1 <= sched.horizon))
    fail(errc::out_of_range, "need 1 < t0 < t1 <= horizon");
  const double G = problem.lipschitz_bound();
  double rhs = 0.0;
  for (std::uint64_t t = t0; t <= t1; ++t) rhs += G * G * sched.at(t) * sched.at(t);

  const bool exact = problem.deterministic_oracle();
  if (exact) n_seeds = 1;

  auto stat = [&](std::uint32_t idx) {
    RunConfig config;
    config.schedule = sched;
    config.seed = mix_seed(seed0, idx);
    Trace trace = run_sgd(problem, config);
    const double f0 = trace.objective_values[t0 - 1];
    double s = 0.0;
    for (std::uint64_t t = t0; t <= t1; ++t)
      s += 2.0 * sched.at(t) * (trace.objective_values[t - 1] - f0);
    return std::vector<double>{s};
  };
  CurveStats stats = ensemble_curves(n_seeds, threads, stat);
  const double slack = exact ? 0.0 : 3.0 * stats.std_err[0];
  return make_check("lookahead",
                    fmt("t0=%llu,t1=%llu,seeds=%u", static_cast<unsigned long long>(t0),
                        static_cast<unsigned long long>(t1), n_seeds),
                    stats.mean[0], rhs + slack);
}

CertificateReport check_tail(const Problem& problem, const StepSchedule& sched, std::uint64_t t0,
                             std::uint64_t t1, std::span<const double> eta_multipliers,
                             std::uint32_t n_seeds, std::uint64_t seed0, int threads) {
  if (!(1 < t0 && t0 < t1 && t1 <= sched.horizon))
    fail(errc::out_of_range, "need 1 < t0 < t1 <= horizon");
  const double G = problem.lipschitz_bound();
  const double D = problem.diameter();
  const double f_star = problem.known_optimum().value_or(0.0);
  const std::uint64_t r = t1 - t0 + 1;
  const std::vector<double> p(r, 1.0 / static_cast<double>(r));  // uniform mixture
  const double denom = 8.0 * sched.at(t0) * sched.at(t0) * G * G;
  const double l_t0 = martingale_weights(t0, t1).at(t0);

  auto stat = [&](std::uint32_t idx) {
    RunConfig config;
    config.schedule = sched;
    config.seed = mix_seed(seed0, idx);
    Trace trace = run_sgd(problem, config);
    return std::vector<double>{deviation_pA(trace, p, t0, t1, sched, G),
                               deviation_A_star(trace, t0, t1, sched, G, f_star)};
  };

  // keep every draw: tail frequencies need the full sample, and filling
  // preassigned slots keeps the result independent of the thread count
  std::vector<double> pa(n_seeds), astar(n_seeds);
  ensemble_curves(n_seeds, threads, [&](std::uint32_t idx) {
    std::vector<double> v = stat(idx);
    pa[idx] = v[0];
    astar[idx] = v[1];
    return v;
  });

  CertificateReport report;
  const double n = static_cast<double>(n_seeds);
  for (double mult : eta_multipliers) {
    const double eta = mult * denom;
    std::size_t count = 0;
    for (double v : pa) count += v > eta;
    const double freq = static_cast<double>(count) / n;
    const double se = std::sqrt(freq * (1.0 - freq) / n);
    report.push_back(make_check(
        "tail_pA", fmt("eta=%.6g,seeds=%u", eta, n_seeds), freq, std::exp(-mult) + 3.0 * se));

    std::size_t count_star = 0;
    for (double v : astar) count_star += v > eta;
    const double freq_star = static_cast<double>(count_star) / n;
    const double se_star = std::sqrt(freq_star * (1.0 - freq_star) / n);
    const double bound_star =
        std::min(1.0, std::exp(2.0 * D * D * l_t0 / denom) * std::exp(-mult));
    report.push_back(make_check("tail_A_star", fmt("eta=%.6g,seeds=%u", eta, n_seeds), freq_star,
                                bound_star + 3.0 * se_star));
  }
  return report;
}

std::vector<std::uint64_t> phase_argmins(const EnsembleSummary& ensemble, const Breakpoints& bp) {
  if (ensemble.horizon() < bp.horizon)
    fail(errc::invalid_dimensions, "ensemble must cover every iteration");
  auto argmin_on = [&](std::uint64_t lo, std::uint64_t hi) {  // inclusive, ties to smallest t
    std::uint64_t best = lo;
    for (std::uint64_t t = lo + 1; t <= hi; ++t)
      if (ensemble.mean_subopt[t - 1] < ensemble.mean_subopt[best - 1]) best = t;
    return best;
  };
  std::vector<std::uint64_t> tau(bp.k + 2);
  tau[0] = argmin_on((bp.horizon + 3) / 4, bp.points[1]);
  for (std::uint32_t i = 1; i <= bp.k; ++i)
    tau[i] = argmin_on(bp.points[i] + 1, bp.points[i + 1]);
  tau[bp.k + 1] = bp.horizon;  // the chain always ends at the last iterate
  return tau;
}

CertificateReport check_transfer(const Problem& problem, const StepSchedule& base,
                                 std::uint32_t n_seeds, std::uint64_t seed0, int threads) {
  const std::uint64_t horizon = base.horizon;
  const StepSchedule modified = modify_schedule(base, horizon);
  const DecayProfile decay = estimate_decay_constant(base);
  const Breakpoints bp = compute_breakpoints(horizon);
  const double G = problem.lipschitz_bound();
  const double gamma_last = base.at(horizon);

  RunConfig config;
  config.schedule = modified;
  EnsembleSummary ens = run_ensemble(problem, config, n_seeds, seed0, 0.0, threads);
  const std::vector<std::uint64_t> tau = phase_argmins(ens, bp);

  CertificateReport report;
  const double b2 = decay.beta * decay.beta;
  for (std::uint32_t i = 0; i <= bp.k; ++i) {
    const double lhs = ens.mean_subopt[tau[i + 1] - 1] - ens.mean_subopt[tau[i] - 1];
    const double se = std::hypot(ens.std_err[tau[i + 1] - 1], ens.std_err[tau[i] - 1]);
    const double bound = i == 0 ? 5.0 * G * G * gamma_last / (b2 * b2)
                                : 5.0 * G * G * gamma_last / b2 * std::pow(2.0, -double(i));
    report.push_back(make_check(
        "transfer",
        fmt("i=%u,tau_i=%llu,tau_ip1=%llu,beta=%.4g", i, static_cast<unsigned long long>(tau[i]),
            static_cast<unsigned long long>(tau[i + 1]), decay.beta),
        lhs, bound + 3.0 * se));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Exact suites

namespace {

void fold_breakpoints(const Breakpoints& bp, double& worst_monotone, double& worst_endpoints,
                      double& worst_division, double& worst_k) {
  const auto& p = bp.points;
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    worst_monotone = std::max(worst_monotone,
                              static_cast<double>(p[i]) - static_cast<double>(p[i + 1]) + 1.0);
  double end_err = 0.0;
  end_err += p[0] != 0;
  end_err += p[bp.k] != bp.horizon - 1;
  end_err += p[bp.k + 1] != bp.horizon;
  worst_endpoints = std::max(worst_endpoints, end_err);
  for (std::uint32_t i = 0; i + 1 <= bp.k; ++i) {
    const double gap_next = static_cast<double>(p[i + 2] - p[i + 1]);
    const double gap = static_cast<double>(p[i + 1] - p[i]);
    worst_division = std::max(worst_division, gap - 4.0 * gap_next);
  }
  // k must be the first i with T <= 2^i
  const bool k_ok = (static_cast<std::uint64_t>(1) << bp.k) >= bp.horizon &&
                    (bp.k == 0 || (static_cast<std::uint64_t>(1) << (bp.k - 1)) < bp.horizon);
  worst_k = std::max(worst_k, k_ok ? 0.0 : 1.0);
}

}  // namespace

CertificateReport breakpoints_suite(std::uint64_t dense_max, std::uint32_t dyadic_log2_max) {
  double worst_monotone = -1e300, worst_endpoints = 0.0, worst_division = -1e300, worst_k = 0.0;
  std::uint64_t tested = 0;
  for (std::uint64_t t = 4; t <= dense_max; ++t) {
    fold_breakpoints(compute_breakpoints(t), worst_monotone, worst_endpoints, worst_division,
                     worst_k);
    ++tested;
  }
  for (std::uint32_t e = 2; e <= dyadic_log2_max; ++e) {
    const std::uint64_t t = static_cast<std::uint64_t>(1) << e;
    if (t <= dense_max) continue;
    fold_breakpoints(compute_breakpoints(t), worst_monotone, worst_endpoints, worst_division,
                     worst_k);
    ++tested;
  }
  const std::string params = fmt("dense_max=%llu,dyadic_max=2^%u,tested=%llu",
                                 static_cast<unsigned long long>(dense_max), dyadic_log2_max,
                                 static_cast<unsigned long long>(tested));
  CertificateReport report;
  report.push_back(make_check("breakpoints_monotone", params, worst_monotone, 0.0));
  report.push_back(make_check("breakpoints_endpoints", params, worst_endpoints, 0.0));
  report.push_back(make_check("breakpoints_division_length", params, worst_division, 0.0));
  report.push_back(make_check("breakpoints_k_minimal", params, worst_k, 0.0));
  return report;
}

CertificateReport weights_suite(std::span<const std::uint64_t> ranges) {
  CertificateReport report;
  for (std::uint64_t r : ranges) {
    const MartingaleWeights w = martingale_weights(1, r);
    double lo = 1e300, hi = -1e300;
    for (double v : w.L) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double rr = static_cast<double>(r);
    const std::string params = fmt("r=%llu", static_cast<unsigned long long>(r));
    report.push_back(make_check("weights_lower", params, 1.0 / (std::numbers::e * rr), lo));
    report.push_back(make_check("weights_upper", params, hi, 1.0 / rr));
  }
  // forward growth: lambda_{i+1} = lambda_i + Gamma lambda_i^2 stays under
  // (1 + 1/r)^i lambda_0 for i <= r
  for (double g : {0.5, 1.0, 2.0}) {
    for (std::uint64_t r : {std::uint64_t(10), std::uint64_t(1000), std::uint64_t(100000)}) {
      const double rr = static_cast<double>(r);
      double lam = 1.0 / (rr * std::numbers::e * g);
      double envelope = lam;
      double worst = -1e300;
      for (std::uint64_t i = 0; i <= r; ++i) {
        worst = std::max(worst, lam - envelope);
        lam += g * lam * lam;
        envelope *= 1.0 + 1.0 / rr;
      }
      report.push_back(make_check("lambda_growth",
                                  fmt("gamma=%.2g,r=%llu", g, static_cast<unsigned long long>(r)),
                                  worst, 0.0));
    }
  }
  return report;
}

CertificateReport kappa_suite(std::uint32_t n_configs, std::uint64_t seed) {
  RngStream rng(seed);
  double worst_mass = 0.0, worst_neg = -1e300, worst_tail = 0.0, worst_sigma = 0.0;
  for (std::uint32_t c = 0; c < n_configs; ++c) {
    const std::uint64_t horizon = 8 + rng.next_index(2041);  // 8..2048
    const Breakpoints bp = compute_breakpoints(horizon);
    const std::uint32_t phase = static_cast<std::uint32_t>(rng.next_index(bp.k));

    StepSchedule sched;
    switch (rng.next_index(3)) {
      case 0: sched = weak_schedule(horizon, 0.1 + 9.9 * rng.next_unit()); break;
      case 1: sched = strong_schedule(horizon, 0.1 + 9.9 * rng.next_unit()); break;
      default:
        sched = modify_schedule(
            standard_schedule(Family::inv_sqrt_t, horizon, 0.1 + 9.9 * rng.next_unit(), 0.0),
            horizon);
    }

    const std::uint64_t lo = phase == 0 ? (horizon + 3) / 4 : bp.points[phase] + 1;
    const std::uint64_t mid = bp.points[phase + 1];
    std::vector<double> q(mid - lo + 1);
    double qs = 0.0;
    for (double& v : q) {
      v = rng.next_unit();
      v *= v;  // uneven masses
      qs += v;
    }
    for (double& v : q) v /= qs;

    const TransferDistribution td = transfer_distribution(q, phase, bp, sched);
    worst_mass = std::max(worst_mass, std::fabs(td.total() - 1.0));
    for (double v : td.kappa) worst_neg = std::max(worst_neg, -v);
    for (std::uint64_t t = mid + 1; t <= td.support_hi; ++t)
      worst_tail = std::max(worst_tail, std::fabs(td.kappa_at(t)));

    // sigma(t) = Gamma(mid)/Gamma(t) * sum_{s<=t} q(s), pointwise
    const MartingaleWeights w = martingale_weights(lo, td.support_hi);
    std::vector<double> gamma_tail(td.support_hi - lo + 2, 0.0);
    for (std::uint64_t t = td.support_hi; t >= lo; --t)
      gamma_tail[t - lo] = gamma_tail[t - lo + 1] + sched.at(t) * w.at(t);
    double sigma = 0.0, qsum = 0.0;
    for (std::uint64_t t = lo; t <= mid; ++t) {
      sigma += td.kappa_at(t);
      qsum += q[t - lo];
      const double expect = gamma_tail[mid - lo + 1] / gamma_tail[t - lo + 1] * qsum;
      worst_sigma = std::max(worst_sigma, std::fabs(sigma - expect));
    }
  }
  const std::string params = fmt("configs=%u,seed=%llu", n_configs,
                                 static_cast<unsigned long long>(seed));
  CertificateReport report;
  report.push_back(make_check("kappa_mass", params, worst_mass, 1e-9));
  report.push_back(make_check("kappa_nonnegative", params, worst_neg, 0.0));
  report.push_back(make_check("kappa_zero_past_phase", params, worst_tail, 0.0));
  report.push_back(make_check("kappa_sigma_identity", params, worst_sigma, 1e-9));
  return report;
}

}  // namespace laststep
