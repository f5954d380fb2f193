#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laststep/certificates.hpp"
#include "laststep/problem.hpp"
#include "laststep/schedule.hpp"
#include "laststep/sgd.hpp"

namespace laststep {

// Problem specs: "lasso[:d=..,s=..,n=..,sigma=..,reg=..,seed=..,radius=..]",
// "svm[:d=..,n=..,sigma=..,eta=..,reg=..,seed=..,radius=..]", "absquad",
// "quad", or the path of a dataset CSV written by write_problem_csv.
// Omitted keys fall back to the reference experiment configuration.
std::unique_ptr<Problem> parse_problem(const std::string& spec_or_path);
void write_problem_csv(const Problem& problem, const std::string& path);
std::unique_ptr<Problem> load_problem_csv(const std::string& path);

// Schedule specs: "constant:C=..", "inv_sqrt_t:C=..", "harmonic:lambda=..",
// "weak_modified:C=..", "strong_modified:lambda=..".
StepSchedule parse_schedule(const std::string& spec, std::uint64_t horizon);

void write_schedule_csv(const StepSchedule& sched, const std::string& path);
void write_trace_csv(const Trace& trace, double f_star, const std::string& path);
void write_ensemble_csv(const EnsembleSummary& ensemble, const std::string& path);
void write_report_csv(const CertificateReport& report, const std::string& config,
                      const std::string& path);

enum class Averaging { last, suffix_quarter, running };
const char* averaging_name(Averaging a);
std::optional<Averaging> averaging_from_name(const std::string& name);

struct MethodSpec {
  std::string schedule;  // e.g. "strong_modified:lambda=0.1"
  Averaging averaging = Averaging::last;

  std::string label() const;
  static MethodSpec parse(const std::string& text);  // "<schedule>/<averaging>"
  bool operator==(const MethodSpec&) const = default;
};

struct ExperimentSpec {
  std::string problem;
  std::vector<MethodSpec> methods;
  std::uint64_t horizon = 0;
  std::uint32_t n_seeds = 1;
  std::uint64_t seed0 = 0;
  std::uint32_t curve_points = 0;  // 0 = a row for every t
  std::string out;

  static ExperimentSpec parse(const std::string& config_text);
  std::string to_config_text() const;
  bool operator==(const ExperimentSpec&) const = default;
};

struct ExperimentReport {
  struct Row {
    std::string method;
    std::uint64_t t = 0;
    double mean_objective = 0.0;
    double std_err = 0.0;
  };
  std::vector<Row> rows;
  std::string config_text;
};

// Seeds are paired across methods: run i of every method consumes the same
// oracle draws, so curve gaps reflect the schedules rather than the noise.
ExperimentReport run_experiment(const ExperimentSpec& spec, int threads);
void write_experiment_csv(const ExperimentReport& report, const std::string& path);
ExperimentReport read_experiment_csv(const std::string& path);

struct RateFit {
  std::vector<std::uint64_t> horizons;  // points kept by the noise filter
  std::vector<double> subopt;           // mean last-iterate suboptimality per horizon
  std::vector<double> std_err;
  std::vector<double> bound;            // closed-form bound when known, else NaN
  std::vector<std::vector<double>> final_subopt;  // per horizon, per seed
  double slope = 0.0;  // least squares on log subopt vs log T
  double slope_lo = 0.0, slope_hi = 0.0;  // bootstrap 95% band
  double max_bound_ratio = 0.0;
  double f_star = 0.0;
};

RateFit fit_rate(const Problem& problem, const std::string& schedule_spec,
                 std::span<const std::uint64_t> horizons, std::uint32_t n_seeds,
                 std::uint64_t seed0, int threads, std::uint32_t bootstrap_reps = 400);

// least-squares slope of log(values) against log(horizons)
double loglog_slope(std::span<const std::uint64_t> horizons, std::span<const double> values);

// 4D^2/(C sqrt(T)) + 11 G^2 C / sqrt(T) for the weak modification,
// 130 G^2/(lambda T) for the strong one
std::optional<double> closed_form_bound(const Problem& problem, const StepSchedule& sched);

void write_ratefit_csv(const RateFit& fit, const std::string& config, const std::string& path);

std::string render_figure(const ExperimentReport& report, bool log_y);
std::string render_figure_from_csv(const std::string& report_csv, bool log_y);

}  // namespace laststep
