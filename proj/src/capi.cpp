#include "laststep.h"

#include <cmath>
#include <cstring>
#include <memory>
#include <string>

#include "laststep/certificates.hpp"
#include "laststep/csv.hpp"
#include "laststep/errors.hpp"
#include "laststep/harness.hpp"
#include "laststep/lowerbound.hpp"
#include "laststep/problem.hpp"
#include "laststep/schedule.hpp"
#include "laststep/sgd.hpp"

using namespace laststep;

extern "C" {
struct laststep_breakpoints { Breakpoints rep; };
struct laststep_schedule { StepSchedule rep; };
struct laststep_problem { std::shared_ptr<const Problem> rep; };
struct laststep_trace { Trace rep; };
struct laststep_ensemble { EnsembleSummary rep; };
struct laststep_report { CertificateReport rep; };
}

namespace {

thread_local std::string g_last_error;

laststep_status status_of(errc code) {
  switch (code) {
    case errc::ok: return LASTSTEP_OK;
    case errc::horizon_too_small: return LASTSTEP_ERR_HORIZON_TOO_SMALL;
    case errc::not_decreasing: return LASTSTEP_ERR_NOT_DECREASING;
    case errc::unknown_family: return LASTSTEP_ERR_UNKNOWN_FAMILY;
    case errc::dimension_mismatch: return LASTSTEP_ERR_DIMENSION_MISMATCH;
    case errc::iterates_not_recorded: return LASTSTEP_ERR_ITERATES_NOT_RECORDED;
    case errc::out_of_range:
    case errc::empty_range:
    case errc::phase_out_of_range:
    case errc::level_too_small: return LASTSTEP_ERR_OUT_OF_RANGE;
    case errc::io_error: return LASTSTEP_ERR_IO;
    case errc::bad_config: return LASTSTEP_ERR_BAD_CONFIG;
    default: return LASTSTEP_ERR_INVALID_ARGUMENT;
  }
}

template <typename Fn>
laststep_status guarded(Fn&& fn) {
  try {
    fn();
    return LASTSTEP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LASTSTEP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return LASTSTEP_ERR_INTERNAL;
  }
}

}  // namespace

extern "C" {

const char* laststep_version(void) { return kVersion; }
const char* laststep_last_error(void) { return g_last_error.c_str(); }

/* ---- breakpoints ---- */

laststep_status laststep_breakpoints_compute(uint64_t horizon, laststep_breakpoints** out) {
  return guarded([&] { *out = new laststep_breakpoints{compute_breakpoints(horizon)}; });
}

uint32_t laststep_breakpoints_k(const laststep_breakpoints* bp) { return bp->rep.k; }

uint64_t laststep_breakpoints_point(const laststep_breakpoints* bp, uint32_t i) {
  return i < bp->rep.points.size() ? bp->rep.points[i] : 0;
}

int32_t laststep_breakpoints_phase(const laststep_breakpoints* bp, uint64_t t) {
  if (t < 1 || t > bp->rep.horizon) return -1;
  return static_cast<int32_t>(bp->rep.phase_of(t));
}

void laststep_breakpoints_free(laststep_breakpoints* bp) { delete bp; }

/* ---- schedules ---- */

laststep_status laststep_schedule_make(const char* family, uint64_t horizon, double scale,
                                       double lambda, laststep_schedule** out) {
  return guarded([&] {
    auto f = family_from_name(family ? family : "");
    if (!f) fail(errc::unknown_family, std::string("unknown family '") + (family ? family : "") + "'");
    StepSchedule s;
    switch (*f) {
      case Family::weak_modified: s = weak_schedule(horizon, scale); break;
      case Family::strong_modified: s = strong_schedule(horizon, lambda); break;
      default: s = standard_schedule(*f, horizon, scale, lambda); break;
    }
    *out = new laststep_schedule{std::move(s)};
  });
}

laststep_status laststep_schedule_parse(const char* spec, uint64_t horizon,
                                        laststep_schedule** out) {
  return guarded([&] {
    *out = new laststep_schedule{parse_schedule(spec ? spec : "", horizon)};
  });
}

laststep_status laststep_schedule_modify(const laststep_schedule* base, uint64_t horizon,
                                         laststep_schedule** out) {
  return guarded([&] { *out = new laststep_schedule{modify_schedule(base->rep, horizon)}; });
}

laststep_status laststep_schedule_custom(const double* alpha, uint64_t horizon,
                                         laststep_schedule** out) {
  return guarded([&] {
    if (!alpha || horizon < 1) fail(errc::invalid_dimensions, "need steps and horizon >= 1");
    StepSchedule s;
    s.horizon = horizon;
    s.family = Family::custom;
    s.alpha.assign(alpha, alpha + horizon);
    for (double v : s.alpha)
      if (!(v > 0.0) || !std::isfinite(v)) fail(errc::nonpositive_step, "steps must be positive");
    *out = new laststep_schedule{std::move(s)};
  });
}

uint64_t laststep_schedule_horizon(const laststep_schedule* s) { return s->rep.horizon; }
const char* laststep_schedule_family(const laststep_schedule* s) {
  return family_name(s->rep.family);
}

double laststep_schedule_alpha(const laststep_schedule* s, uint64_t t) {
  if (t < 1 || t > s->rep.horizon) return std::nan("");
  return s->rep.at(t);
}

int32_t laststep_schedule_phase(const laststep_schedule* s, uint64_t t) {
  if (t < 1 || t > s->rep.horizon) return -1;
  return s->rep.phase_of(t);
}

laststep_status laststep_schedule_decay(const laststep_schedule* s, double* beta,
                                        int* is_decreasing) {
  return guarded([&] {
    DecayProfile p = estimate_decay_constant(s->rep);
    if (beta) *beta = p.beta;
    if (is_decreasing) *is_decreasing = p.is_decreasing ? 1 : 0;
  });
}

laststep_status laststep_schedule_write_csv(const laststep_schedule* s, const char* path) {
  return guarded([&] { write_schedule_csv(s->rep, path); });
}

void laststep_schedule_free(laststep_schedule* s) { delete s; }

/* ---- problems ---- */

laststep_status laststep_problem_lasso(uint32_t dim, uint32_t sparsity, uint32_t n_samples,
                                       double sigma, double reg, uint64_t seed, double radius,
                                       laststep_problem** out) {
  return guarded([&] {
    *out = new laststep_problem{make_lasso(dim, sparsity, n_samples, sigma, reg, seed, radius)};
  });
}

laststep_status laststep_problem_svm(uint32_t dim, uint32_t n_samples, double sigma, double eta,
                                     double reg, uint64_t seed, double radius,
                                     laststep_problem** out) {
  return guarded([&] {
    *out = new laststep_problem{make_svm(dim, n_samples, sigma, eta, reg, seed, radius)};
  });
}

laststep_status laststep_problem_abs_quadratic(laststep_problem** out) {
  return guarded([&] { *out = new laststep_problem{make_abs_quadratic()}; });
}

laststep_status laststep_problem_pure_quadratic(laststep_problem** out) {
  return guarded([&] { *out = new laststep_problem{make_pure_quadratic()}; });
}

laststep_status laststep_problem_parse(const char* spec_or_path, laststep_problem** out) {
  return guarded([&] { *out = new laststep_problem{parse_problem(spec_or_path ? spec_or_path : "")}; });
}

laststep_status laststep_problem_rescaled(const laststep_problem* p, laststep_problem** out) {
  return guarded([&] { *out = new laststep_problem{make_rescaled(p->rep)}; });
}

size_t laststep_problem_dim(const laststep_problem* p) { return p->rep->dim(); }
const char* laststep_problem_kind(const laststep_problem* p) { return p->rep->kind(); }
double laststep_problem_lipschitz(const laststep_problem* p) { return p->rep->lipschitz_bound(); }
double laststep_problem_diameter(const laststep_problem* p) { return p->rep->diameter(); }
double laststep_problem_strong_convexity(const laststep_problem* p) {
  return p->rep->strong_convexity();
}

laststep_status laststep_problem_objective(const laststep_problem* p, const double* x, size_t dim,
                                           double* out) {
  return guarded([&] {
    if (dim != p->rep->dim()) fail(errc::dimension_mismatch, "point dimension");
    *out = p->rep->objective(std::span<const double>(x, dim));
  });
}

laststep_status laststep_problem_reference_optimum(const laststep_problem* p, uint64_t budget,
                                                   double* out) {
  return guarded([&] { *out = reference_optimum(*p->rep, budget); });
}

laststep_status laststep_problem_optimum(const laststep_problem* p, uint64_t budget, double* out) {
  return guarded([&] { *out = resolve_optimum(*p->rep, budget); });
}

laststep_status laststep_problem_write_csv(const laststep_problem* p, const char* path) {
  return guarded([&] { write_problem_csv(*p->rep, path); });
}

void laststep_problem_free(laststep_problem* p) { delete p; }

/* ---- runs ---- */

laststep_status laststep_run(const laststep_problem* p, const laststep_schedule* s,
                             const double* x1, size_t x1_dim, uint64_t seed, int record_iterates,
                             int deterministic, laststep_trace** out) {
  return guarded([&] {
    RunConfig config;
    config.schedule = s->rep;
    if (x1) config.x1.assign(x1, x1 + x1_dim);
    config.seed = seed;
    config.record = record_iterates ? RecordMode::full_iterates : RecordMode::objectives_only;
    config.deterministic = deterministic != 0;
    *out = new laststep_trace{run_sgd(*p->rep, config)};
  });
}

uint64_t laststep_trace_horizon(const laststep_trace* tr) { return tr->rep.horizon(); }

double laststep_trace_objective(const laststep_trace* tr, uint64_t t) {
  if (t < 1 || t > tr->rep.horizon()) return std::nan("");
  return tr->rep.objective_values[t - 1];
}

laststep_status laststep_trace_iterate(const laststep_trace* tr, uint64_t t, double* x,
                                       size_t dim) {
  return guarded([&] {
    if (!tr->rep.has_iterates()) fail(errc::iterates_not_recorded, "run kept objectives only");
    if (t < 1 || t > tr->rep.horizon()) fail(errc::out_of_range, "iteration out of range");
    if (dim != tr->rep.dim) fail(errc::dimension_mismatch, "output buffer dimension");
    auto xt = tr->rep.iterate(t);
    std::memcpy(x, xt.data(), dim * sizeof(double));
  });
}

laststep_status laststep_trace_suffix_average(const laststep_problem* p, const laststep_trace* tr,
                                              double fraction, double* value) {
  return guarded([&] { *value = suffix_average(*p->rep, tr->rep, fraction).value; });
}

laststep_status laststep_trace_write_csv(const laststep_trace* tr, double f_star,
                                         const char* path) {
  return guarded([&] { write_trace_csv(tr->rep, f_star, path); });
}

void laststep_trace_free(laststep_trace* tr) { delete tr; }

/* ---- ensembles ---- */

laststep_status laststep_ensemble_run(const laststep_problem* p, const laststep_schedule* s,
                                      uint32_t n_seeds, uint64_t seed0, double f_star, int threads,
                                      laststep_ensemble** out) {
  return guarded([&] {
    RunConfig config;
    config.schedule = s->rep;
    *out = new laststep_ensemble{run_ensemble(*p->rep, config, n_seeds, seed0, f_star, threads)};
  });
}

uint64_t laststep_ensemble_horizon(const laststep_ensemble* e) { return e->rep.horizon(); }

double laststep_ensemble_mean_subopt(const laststep_ensemble* e, uint64_t t) {
  if (t < 1 || t > e->rep.horizon()) return std::nan("");
  return e->rep.mean_subopt[t - 1];
}

double laststep_ensemble_stderr(const laststep_ensemble* e, uint64_t t) {
  if (t < 1 || t > e->rep.horizon()) return std::nan("");
  return e->rep.std_err[t - 1];
}

laststep_status laststep_ensemble_write_csv(const laststep_ensemble* e, const char* path) {
  return guarded([&] { write_ensemble_csv(e->rep, path); });
}

void laststep_ensemble_free(laststep_ensemble* e) { delete e; }

/* ---- certificates ---- */

laststep_status laststep_certify_breakpoints(uint64_t dense_max, uint32_t dyadic_log2_max,
                                             laststep_report** out) {
  return guarded([&] {
    *out = new laststep_report{breakpoints_suite(dense_max, dyadic_log2_max)};
  });
}

laststep_status laststep_certify_weights(const uint64_t* ranges, size_t n_ranges,
                                         laststep_report** out) {
  return guarded([&] {
    *out = new laststep_report{weights_suite(std::span<const uint64_t>(ranges, n_ranges))};
  });
}

laststep_status laststep_certify_kappa(uint32_t n_configs, uint64_t seed, laststep_report** out) {
  return guarded([&] { *out = new laststep_report{kappa_suite(n_configs, seed)}; });
}

laststep_status laststep_certify_lookahead(const laststep_problem* p, const laststep_schedule* s,
                                           uint64_t t0, uint64_t t1, uint32_t n_seeds,
                                           uint64_t seed0, int threads, laststep_report** out) {
  return guarded([&] {
    *out = new laststep_report{
        {check_lookahead(*p->rep, s->rep, t0, t1, n_seeds, seed0, threads)}};
  });
}

laststep_status laststep_certify_tail(const laststep_problem* p, const laststep_schedule* s,
                                      uint64_t t0, uint64_t t1, const double* eta_multipliers,
                                      size_t n_eta, uint32_t n_seeds, uint64_t seed0, int threads,
                                      laststep_report** out) {
  return guarded([&] {
    static const double default_grid[] = {0.5, 1.0, 2.0, 4.0};
    std::span<const double> grid = eta_multipliers
                                       ? std::span<const double>(eta_multipliers, n_eta)
                                       : std::span<const double>(default_grid, 4);
    *out = new laststep_report{check_tail(*p->rep, s->rep, t0, t1, grid, n_seeds, seed0, threads)};
  });
}

laststep_status laststep_certify_transfer(const laststep_problem* p, const laststep_schedule* base,
                                          uint32_t n_seeds, uint64_t seed0, int threads,
                                          laststep_report** out) {
  return guarded([&] {
    *out = new laststep_report{check_transfer(*p->rep, base->rep, n_seeds, seed0, threads)};
  });
}

size_t laststep_report_size(const laststep_report* r) { return r->rep.size(); }
const char* laststep_report_check(const laststep_report* r, size_t i) {
  return i < r->rep.size() ? r->rep[i].check.c_str() : "";
}
const char* laststep_report_params(const laststep_report* r, size_t i) {
  return i < r->rep.size() ? r->rep[i].params.c_str() : "";
}
double laststep_report_lhs(const laststep_report* r, size_t i) {
  return i < r->rep.size() ? r->rep[i].lhs : std::nan("");
}
double laststep_report_rhs(const laststep_report* r, size_t i) {
  return i < r->rep.size() ? r->rep[i].rhs : std::nan("");
}
double laststep_report_margin(const laststep_report* r, size_t i) {
  return i < r->rep.size() ? r->rep[i].margin : std::nan("");
}
int laststep_report_pass(const laststep_report* r, size_t i) {
  return i < r->rep.size() && r->rep[i].pass ? 1 : 0;
}
int laststep_report_all_pass(const laststep_report* r) { return all_pass(r->rep) ? 1 : 0; }

laststep_status laststep_report_write_csv(const laststep_report* r, const char* config,
                                          const char* path) {
  return guarded([&] { write_report_csv(r->rep, config ? config : "", path); });
}

void laststep_report_free(laststep_report* r) { delete r; }

/* ---- lower-bound lab ---- */

laststep_status laststep_lb_recursion(const double* gamma, uint64_t horizon, double* expected_sq,
                                      uint64_t* t_zero) {
  return guarded([&] {
    SquareRecursion rec =
        expected_square_recursion(std::span<const double>(gamma, horizon), horizon);
    std::memcpy(expected_sq, rec.expected_sq.data(), horizon * sizeof(double));
    if (t_zero) *t_zero = rec.t_zero;
  });
}

laststep_status laststep_lb_recursion_csv(const double* gamma, uint64_t horizon, const char* path,
                                          int* all_pass) {
  return guarded([&] {
    SquareRecursion rec =
        expected_square_recursion(std::span<const double>(gamma, horizon), horizon);
    CsvWriter csv(path, "lowerbound=recursion,T=" + std::to_string(horizon));
    csv.header({"t", "expected_sq", "lower_bound"});
    bool ok = true;
    for (uint64_t t = 1; t <= horizon; ++t) {
      const double lb =
          t < rec.t_zero ? 1.0 : 1.0 / static_cast<double>(t - rec.t_zero + 1);
      ok = ok && rec.expected_sq[t - 1] >= lb * (1.0 - 1e-12);
      csv.row({std::to_string(t), format_double(rec.expected_sq[t - 1]), format_double(lb)});
    }
    if (all_pass) *all_pass = ok ? 1 : 0;
  });
}

laststep_status laststep_lb_drift(const double* gamma, uint64_t horizon, uint32_t n_seeds,
                                  uint64_t seed0, int threads, double* mean_abs, double* std_err) {
  return guarded([&] {
    DriftEstimate est =
        simulate_drift(std::span<const double>(gamma, horizon), horizon, n_seeds, seed0, threads);
    std::memcpy(mean_abs, est.mean_abs.data(), horizon * sizeof(double));
    if (std_err) std::memcpy(std_err, est.std_err.data(), horizon * sizeof(double));
  });
}

laststep_status laststep_lb_drift_csv(const double* gamma, uint64_t horizon, uint32_t n_seeds,
                                      uint64_t seed0, int threads, const char* path,
                                      int* all_pass) {
  return guarded([&] {
    DriftEstimate est =
        simulate_drift(std::span<const double>(gamma, horizon), horizon, n_seeds, seed0, threads);
    CsvWriter csv(path, "lowerbound=drift,T=" + std::to_string(horizon) +
                            ",seeds=" + std::to_string(n_seeds));
    csv.header({"t", "mean_abs", "half_min_1_gamma"});
    bool ok = true;
    for (uint64_t t = 1; t <= horizon; ++t) {
      // the floor applies to x_{t+1}, driven by gamma_t
      const double floor_v = t == 1 ? 0.0 : 0.5 * std::min(1.0, gamma[t - 2]);
      ok = ok && est.mean_abs[t - 1] >= floor_v - 3.0 * est.std_err[t - 1];
      csv.row({std::to_string(t), format_double(est.mean_abs[t - 1]), format_double(floor_v)});
    }
    if (all_pass) *all_pass = ok ? 1 : 0;
  });
}

laststep_status laststep_lb_event(uint32_t level, uint32_t n_trials, uint64_t seed, double* p_hat,
                                  double* ci_lo, double* ci_hi, double* oracle) {
  return guarded([&] {
    EventEstimate e = estimate_event(level, n_trials, seed);
    if (p_hat) *p_hat = e.p_complement;
    if (ci_lo) *ci_lo = e.ci_lo;
    if (ci_hi) *ci_hi = e.ci_hi;
    if (oracle) *oracle = e.oracle;
  });
}

laststep_status laststep_lb_events_csv(uint32_t level_min, uint32_t level_max, uint32_t n_trials,
                                       uint64_t seed, const char* path, int* all_pass) {
  return guarded([&] {
    CsvWriter csv(path, "lowerbound=events,k=" + std::to_string(level_min) + ".." +
                            std::to_string(level_max) + ",trials=" + std::to_string(n_trials));
    csv.header({"k", "p_akc_hat", "ci_lo", "ci_hi", "oracle"});
    bool ok = true;
    for (uint32_t k = level_min; k <= level_max; ++k) {
      EventEstimate e = estimate_event(k, n_trials, seed + k);
      const double sd = std::sqrt(e.oracle * (1.0 - e.oracle) / n_trials);
      ok = ok && std::fabs(e.p_complement - e.oracle) <= 3.0 * sd + 1e-12;
      csv.row({std::to_string(k), format_double(e.p_complement), format_double(e.ci_lo),
               format_double(e.ci_hi), format_double(e.oracle)});
    }
    if (all_pass) *all_pass = ok ? 1 : 0;
  });
}

namespace {

void trichotomy_level_flags(const ScheduleDiagnostics& d, uint32_t max_level,
                            uint32_t* level_flags, uint32_t* global_flags) {
  if (level_flags) {
    for (uint32_t k = 0; k <= max_level; ++k) level_flags[k] = 0;
    if (d.super_harmonic)
      for (uint32_t k : d.growth_witnesses) level_flags[k] |= 1u;
    if (d.expectation_bad)
      for (uint32_t k : d.growth_witnesses) level_flags[k] |= 2u;
    for (uint32_t k : d.as_witnesses) level_flags[k] |= 4u;
  }
  if (global_flags)
    *global_flags = (d.super_harmonic ? 1u : 0u) | (d.expectation_bad ? 2u : 0u) |
                    (d.almost_surely_bad ? 4u : 0u);
}

}  // namespace

laststep_status laststep_lb_trichotomy(const double* gamma, uint64_t len, uint32_t max_level,
                                       double c0, double d0, uint32_t window, double growth_ratio,
                                       uint32_t min_level, double* eta, double* lam,
                                       uint32_t* level_flags, uint32_t* global_flags) {
  return guarded([&] {
    TrichotomyOptions opts;
    if (c0 > 0.0) opts.c0 = c0;
    if (d0 > 0.0) opts.d0 = d0;
    if (window > 0) opts.window = window;
    if (growth_ratio > 0.0) opts.growth_ratio = growth_ratio;
    if (min_level > 0) opts.min_level = min_level;
    ScheduleDiagnostics d =
        schedule_trichotomy(std::span<const double>(gamma, len), max_level, opts);
    if (eta) std::memcpy(eta, d.eta.data(), (max_level + 1) * sizeof(double));
    if (lam) std::memcpy(lam, d.lam.data(), (max_level + 1) * sizeof(double));
    trichotomy_level_flags(d, max_level, level_flags, global_flags);
  });
}

laststep_status laststep_lb_trichotomy_csv(const double* gamma, uint64_t len, uint32_t max_level,
                                           double c0, double d0, uint32_t window,
                                           double growth_ratio, uint32_t min_level,
                                           const char* path, int* all_pass) {
  return guarded([&] {
    TrichotomyOptions opts;
    if (c0 > 0.0) opts.c0 = c0;
    if (d0 > 0.0) opts.d0 = d0;
    if (window > 0) opts.window = window;
    if (growth_ratio > 0.0) opts.growth_ratio = growth_ratio;
    if (min_level > 0) opts.min_level = min_level;
    ScheduleDiagnostics d =
        schedule_trichotomy(std::span<const double>(gamma, len), max_level, opts);
    std::vector<uint32_t> flags(max_level + 1);
    uint32_t global = 0;
    trichotomy_level_flags(d, max_level, flags.data(), &global);
    CsvWriter csv(path, "lowerbound=trichotomy,K=" + std::to_string(max_level));
    csv.header({"k", "eta", "lambda", "flags"});
    for (uint32_t k = 0; k <= max_level; ++k)
      csv.row({std::to_string(k), format_double(d.eta[k]), format_double(d.lam[k]),
               std::to_string(flags[k])});
    if (all_pass) *all_pass = global != 0 ? 1 : 0;  // at least one failure mode detected
  });
}

/* ---- harness ---- */

laststep_status laststep_experiment_run(const char* config_text, int threads,
                                        const char* out_csv) {
  return guarded([&] {
    ExperimentSpec spec = ExperimentSpec::parse(config_text ? config_text : "");
    ExperimentReport report = run_experiment(spec, threads);
    const std::string path = out_csv && *out_csv ? out_csv : spec.out;
    if (path.empty()) fail(errc::bad_config, "no output path given");
    write_experiment_csv(report, path);
  });
}

laststep_status laststep_ratefit_run(const char* problem_spec, const char* schedule_spec,
                                     const uint64_t* horizons, size_t n_horizons,
                                     uint32_t n_seeds, uint64_t seed0, int threads,
                                     const char* out_csv, double* slope, double* slope_lo,
                                     double* slope_hi, double* max_bound_ratio) {
  return guarded([&] {
    auto problem = parse_problem(problem_spec ? problem_spec : "");
    RateFit fit = fit_rate(*problem, schedule_spec ? schedule_spec : "",
                           std::span<const uint64_t>(horizons, n_horizons), n_seeds, seed0,
                           threads);
    if (out_csv && *out_csv) {
      std::string cfg = std::string("ratefit,problem=") + problem_spec +
                        ",schedule=" + schedule_spec + ",seeds=" + std::to_string(n_seeds) +
                        ",seed0=" + std::to_string(seed0);
      write_ratefit_csv(fit, cfg, out_csv);
    }
    if (slope) *slope = fit.slope;
    if (slope_lo) *slope_lo = fit.slope_lo;
    if (slope_hi) *slope_hi = fit.slope_hi;
    if (max_bound_ratio) *max_bound_ratio = fit.max_bound_ratio;
  });
}

laststep_status laststep_figure_render(const char* report_csv, const char* svg_path, int log_y) {
  return guarded([&] {
    write_text_file(svg_path, render_figure_from_csv(report_csv, log_y != 0));
  });
}

}  // extern "C"
