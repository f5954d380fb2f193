/* laststep: step-size schedules that make the last iterate of projected
 * stochastic subgradient descent converge at the optimal rate, plus the
 * verification toolkit around them.
 *
 * Every function returns LASTSTEP_OK or an error code; the message for the
 * most recent failure on the calling thread is available through
 * laststep_last_error(). Objects are returned through opaque handles and
 * released with the matching _free call. Handles are immutable after
 * creation and may be shared across threads.
 */
#ifndef LASTSTEP_H
#define LASTSTEP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum laststep_status {
  LASTSTEP_OK = 0,
  LASTSTEP_ERR_INVALID_ARGUMENT = 1,
  LASTSTEP_ERR_HORIZON_TOO_SMALL = 2,
  LASTSTEP_ERR_NOT_DECREASING = 3,
  LASTSTEP_ERR_UNKNOWN_FAMILY = 4,
  LASTSTEP_ERR_DIMENSION_MISMATCH = 5,
  LASTSTEP_ERR_ITERATES_NOT_RECORDED = 6,
  LASTSTEP_ERR_OUT_OF_RANGE = 7,
  LASTSTEP_ERR_IO = 8,
  LASTSTEP_ERR_BAD_CONFIG = 9,
  LASTSTEP_ERR_INTERNAL = 10
} laststep_status;

const char* laststep_version(void);
const char* laststep_last_error(void);

typedef struct laststep_breakpoints laststep_breakpoints;
typedef struct laststep_schedule laststep_schedule;
typedef struct laststep_problem laststep_problem;
typedef struct laststep_trace laststep_trace;
typedef struct laststep_ensemble laststep_ensemble;
typedef struct laststep_report laststep_report;

/* ---- breakpoints T_i = T - ceil(T 2^-i) ---------------------------------- */

laststep_status laststep_breakpoints_compute(uint64_t horizon, laststep_breakpoints** out);
uint32_t laststep_breakpoints_k(const laststep_breakpoints* bp);
/* points T_0..T_{k+1}, index 0..k+1 */
uint64_t laststep_breakpoints_point(const laststep_breakpoints* bp, uint32_t i);
/* phase index of iteration t (1-based) */
int32_t laststep_breakpoints_phase(const laststep_breakpoints* bp, uint64_t t);
void laststep_breakpoints_free(laststep_breakpoints* bp);

/* ---- step-size schedules -------------------------------------------------- */

/* family: "constant" C/sqrt(T), "inv_sqrt_t" C/sqrt(t), "harmonic"
 * 1/(lambda t), "weak_modified", "strong_modified" */
laststep_status laststep_schedule_make(const char* family, uint64_t horizon, double scale,
                                       double lambda, laststep_schedule** out);
/* parse "family[:C=..][,lambda=..]" text form */
laststep_status laststep_schedule_parse(const char* spec, uint64_t horizon,
                                        laststep_schedule** out);
/* halving modification of a nonincreasing base */
laststep_status laststep_schedule_modify(const laststep_schedule* base, uint64_t horizon,
                                         laststep_schedule** out);
laststep_status laststep_schedule_custom(const double* alpha, uint64_t horizon,
                                         laststep_schedule** out);
uint64_t laststep_schedule_horizon(const laststep_schedule* s);
const char* laststep_schedule_family(const laststep_schedule* s);
double laststep_schedule_alpha(const laststep_schedule* s, uint64_t t); /* 1-based */
/* phase of t for modified families, -1 otherwise */
int32_t laststep_schedule_phase(const laststep_schedule* s, uint64_t t);
/* decay constant min gamma_{2t}/gamma_t clamped to (0,1], and monotonicity */
laststep_status laststep_schedule_decay(const laststep_schedule* s, double* beta,
                                        int* is_decreasing);
laststep_status laststep_schedule_write_csv(const laststep_schedule* s, const char* path);
void laststep_schedule_free(laststep_schedule* s);

/* ---- problems -------------------------------------------------------------- */

laststep_status laststep_problem_lasso(uint32_t dim, uint32_t sparsity, uint32_t n_samples,
                                       double sigma, double reg, uint64_t seed, double radius,
                                       laststep_problem** out);
laststep_status laststep_problem_svm(uint32_t dim, uint32_t n_samples, double sigma, double eta,
                                     double reg, uint64_t seed, double radius,
                                     laststep_problem** out);
laststep_status laststep_problem_abs_quadratic(laststep_problem** out);
laststep_status laststep_problem_pure_quadratic(laststep_problem** out);
/* inline spec ("lasso:d=..,..", "absquad", ...) or a dataset CSV path */
laststep_status laststep_problem_parse(const char* spec_or_path, laststep_problem** out);
/* rescale a strongly convex problem to modulus 1 and Lipschitz bound 5 */
laststep_status laststep_problem_rescaled(const laststep_problem* p, laststep_problem** out);
size_t laststep_problem_dim(const laststep_problem* p);
const char* laststep_problem_kind(const laststep_problem* p);
double laststep_problem_lipschitz(const laststep_problem* p);
double laststep_problem_diameter(const laststep_problem* p);
double laststep_problem_strong_convexity(const laststep_problem* p);
laststep_status laststep_problem_objective(const laststep_problem* p, const double* x, size_t dim,
                                           double* out);
/* smallest objective seen by deterministic GD with the modified schedule */
laststep_status laststep_problem_reference_optimum(const laststep_problem* p, uint64_t budget,
                                                   double* out);
/* known exact optimum when available, reference_optimum otherwise */
laststep_status laststep_problem_optimum(const laststep_problem* p, uint64_t budget, double* out);
laststep_status laststep_problem_write_csv(const laststep_problem* p, const char* path);
void laststep_problem_free(laststep_problem* p);

/* ---- SGD runs -------------------------------------------------------------- */

/* x1 may be NULL for the problem's default start; deterministic selects the
 * mean-subgradient (plain GD) path */
laststep_status laststep_run(const laststep_problem* p, const laststep_schedule* s,
                             const double* x1, size_t x1_dim, uint64_t seed, int record_iterates,
                             int deterministic, laststep_trace** out);
uint64_t laststep_trace_horizon(const laststep_trace* tr);
double laststep_trace_objective(const laststep_trace* tr, uint64_t t);
laststep_status laststep_trace_iterate(const laststep_trace* tr, uint64_t t, double* x,
                                       size_t dim);
/* mean of the last ceil(fraction*T) iterates and the objective there */
laststep_status laststep_trace_suffix_average(const laststep_problem* p, const laststep_trace* tr,
                                              double fraction, double* value);
laststep_status laststep_trace_write_csv(const laststep_trace* tr, double f_star,
                                         const char* path);
void laststep_trace_free(laststep_trace* tr);

/* ---- seed ensembles --------------------------------------------------------- */

laststep_status laststep_ensemble_run(const laststep_problem* p, const laststep_schedule* s,
                                      uint32_t n_seeds, uint64_t seed0, double f_star, int threads,
                                      laststep_ensemble** out);
uint64_t laststep_ensemble_horizon(const laststep_ensemble* e);
double laststep_ensemble_mean_subopt(const laststep_ensemble* e, uint64_t t);
double laststep_ensemble_stderr(const laststep_ensemble* e, uint64_t t);
laststep_status laststep_ensemble_write_csv(const laststep_ensemble* e, const char* path);
void laststep_ensemble_free(laststep_ensemble* e);

/* ---- certificates ------------------------------------------------------------ */

laststep_status laststep_certify_breakpoints(uint64_t dense_max, uint32_t dyadic_log2_max,
                                             laststep_report** out);
laststep_status laststep_certify_weights(const uint64_t* ranges, size_t n_ranges,
                                         laststep_report** out);
laststep_status laststep_certify_kappa(uint32_t n_configs, uint64_t seed, laststep_report** out);
laststep_status laststep_certify_lookahead(const laststep_problem* p, const laststep_schedule* s,
                                           uint64_t t0, uint64_t t1, uint32_t n_seeds,
                                           uint64_t seed0, int threads, laststep_report** out);
/* eta grid in multiples of 8 alpha_{t0}^2 G^2; NULL selects {0.5,1,2,4} */
laststep_status laststep_certify_tail(const laststep_problem* p, const laststep_schedule* s,
                                      uint64_t t0, uint64_t t1, const double* eta_multipliers,
                                      size_t n_eta, uint32_t n_seeds, uint64_t seed0, int threads,
                                      laststep_report** out);
/* base must be a nonincreasing schedule; it is modified internally */
laststep_status laststep_certify_transfer(const laststep_problem* p, const laststep_schedule* base,
                                          uint32_t n_seeds, uint64_t seed0, int threads,
                                          laststep_report** out);
size_t laststep_report_size(const laststep_report* r);
const char* laststep_report_check(const laststep_report* r, size_t i);
const char* laststep_report_params(const laststep_report* r, size_t i);
double laststep_report_lhs(const laststep_report* r, size_t i);
double laststep_report_rhs(const laststep_report* r, size_t i);
double laststep_report_margin(const laststep_report* r, size_t i);
int laststep_report_pass(const laststep_report* r, size_t i);
int laststep_report_all_pass(const laststep_report* r);
laststep_status laststep_report_write_csv(const laststep_report* r, const char* config,
                                          const char* path);
void laststep_report_free(laststep_report* r);

/* ---- lower-bound lab ----------------------------------------------------------- */

/* E z_{t+1}^2 = (1-gamma_t)^2 E z_t^2 + gamma_t^2 from the pinned start;
 * expected_sq has horizon entries, t_zero reports where the recursion began */
laststep_status laststep_lb_recursion(const double* gamma, uint64_t horizon, double* expected_sq,
                                      uint64_t* t_zero);
laststep_status laststep_lb_recursion_csv(const double* gamma, uint64_t horizon, const char* path,
                                          int* all_pass);
/* mean |x_t| for SGD on |x| + x^2/2 from x_1 = 1 */
laststep_status laststep_lb_drift(const double* gamma, uint64_t horizon, uint32_t n_seeds,
                                  uint64_t seed0, int threads, double* mean_abs, double* std_err);
laststep_status laststep_lb_drift_csv(const double* gamma, uint64_t horizon, uint32_t n_seeds,
                                      uint64_t seed0, int threads, const char* path,
                                      int* all_pass);
/* all-plus-run event over the dyadic block I_level */
laststep_status laststep_lb_event(uint32_t level, uint32_t n_trials, uint64_t seed, double* p_hat,
                                  double* ci_lo, double* ci_hi, double* oracle);
laststep_status laststep_lb_events_csv(uint32_t level_min, uint32_t level_max, uint32_t n_trials,
                                       uint64_t seed, const char* path, int* all_pass);
/* per-level eta/lambda diagnostics; level_flags bit 0 = super-harmonic
 * witness, bit 1 = growth witness, bit 2 = almost-surely witness; global
 * flags use the same bits for the three classifications */
laststep_status laststep_lb_trichotomy(const double* gamma, uint64_t len, uint32_t max_level,
                                       double c0, double d0, uint32_t window, double growth_ratio,
                                       uint32_t min_level, double* eta, double* lam,
                                       uint32_t* level_flags, uint32_t* global_flags);
laststep_status laststep_lb_trichotomy_csv(const double* gamma, uint64_t len, uint32_t max_level,
                                           double c0, double d0, uint32_t window,
                                           double growth_ratio, uint32_t min_level,
                                           const char* path, int* all_pass);

/* ---- harness ---------------------------------------------------------------------- */

/* flat key=value experiment configuration; see the README for the keys */
laststep_status laststep_experiment_run(const char* config_text, int threads,
                                        const char* out_csv);
laststep_status laststep_ratefit_run(const char* problem_spec, const char* schedule_spec,
                                     const uint64_t* horizons, size_t n_horizons,
                                     uint32_t n_seeds, uint64_t seed0, int threads,
                                     const char* out_csv, double* slope, double* slope_lo,
                                     double* slope_hi, double* max_bound_ratio);
laststep_status laststep_figure_render(const char* report_csv, const char* svg_path, int log_y);

#ifdef __cplusplus
}
#endif
#endif /* LASTSTEP_H */
