// Command-line front end for the laststep shared library. Every subcommand
// goes through the C API in laststep.h; exit code 0 means the requested
// operation (and any checks it ran) succeeded.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "laststep.h"

namespace {

int fail_with(laststep_status status) {
  std::fprintf(stderr, "error: %s\n", laststep_last_error());
  return status == LASTSTEP_OK ? 1 : static_cast<int>(status);
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::strtoull(item.c_str(), nullptr, 10));
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::strtod(item.c_str(), nullptr));
  }
  return out;
}

// step sequences for the lower-bound diagnostics
bool build_gamma(const std::string& family, double scale, std::uint64_t len,
                 std::vector<double>& out) {
  out.resize(len);
  for (std::uint64_t t = 1; t <= len; ++t) {
    const double td = static_cast<double>(t);
    double g = 0.0;
    if (family == "invt") g = 1.0 / td;
    else if (family == "invsqrt") g = 1.0 / std::sqrt(td);
    else if (family == "exp2") g = std::pow(2.0, -td);
    else if (family == "invtlogt") g = 1.0 / (td * std::log(td + 1.0));
    else if (family == "constant") g = 1.0;
    else return false;
    out[t - 1] = scale * g;
  }
  return true;
}

// "--config FILE" turns flat key=value lines into long flags placed ahead of
// the explicit arguments, so explicit flags win
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open config %s\n", path.c_str());
    std::exit(1);
  }
  auto given_explicitly = [&args](const std::string& flag) {
    for (const std::string& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
      return s;
    };
    const std::string flag = "--" + trim(line.substr(0, eq));
    if (given_explicitly(flag)) continue;  // explicit flags win
    injected.push_back(flag);
    injected.push_back(trim(line.substr(eq + 1)));
  }
  // keep leading subcommand words in front of the injected flags
  std::size_t head = 0;
  while (head < args.size() && !args[head].empty() && args[head][0] != '-') ++head;
  std::vector<std::string> merged(args.begin(), args.begin() + head);
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + head, args.end());
  return merged;
}

struct ScheduleGuard {
  laststep_schedule* ptr = nullptr;
  ~ScheduleGuard() { laststep_schedule_free(ptr); }
};
struct ProblemGuard {
  laststep_problem* ptr = nullptr;
  ~ProblemGuard() { laststep_problem_free(ptr); }
};
struct ReportGuard {
  laststep_report* ptr = nullptr;
  ~ReportGuard() { laststep_report_free(ptr); }
};

int print_report(laststep_report* report, const std::string& config, const std::string& out) {
  if (!out.empty()) {
    laststep_status st = laststep_report_write_csv(report, config.c_str(), out.c_str());
    if (st != LASTSTEP_OK) return fail_with(st);
  }
  for (std::size_t i = 0; i < laststep_report_size(report); ++i)
    std::printf("[%s] %s (%s): lhs=%.6g rhs=%.6g margin=%.3g\n",
                laststep_report_pass(report, i) ? "PASS" : "FAIL",
                laststep_report_check(report, i), laststep_report_params(report, i),
                laststep_report_lhs(report, i), laststep_report_rhs(report, i),
                laststep_report_margin(report, i));
  return laststep_report_all_pass(report) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"last-iterate step-size schedules for projected SGD"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(laststep_version()));
  const int default_threads = static_cast<int>(std::thread::hardware_concurrency());

  // schedule dump
  auto* schedule_cmd = app.add_subcommand("schedule", "step-size schedules");
  auto* dump = schedule_cmd->add_subcommand("dump", "write a schedule as CSV");
  std::string family = "weak_modified", out_path;
  std::uint64_t horizon = 1024;
  double scale = 1.0, lambda = 1.0;
  dump->add_option("--family", family, "constant|inv_sqrt_t|harmonic|weak_modified|strong_modified");
  dump->add_option("--T", horizon, "horizon")->required();
  dump->add_option("--C", scale, "scale for constant/inv_sqrt_t/weak_modified");
  dump->add_option("--lambda", lambda, "modulus for harmonic/strong_modified");
  dump->add_option("--out", out_path, "output CSV")->required();

  // problem gen
  auto* problem_cmd = app.add_subcommand("problem", "synthetic problems");
  auto* gen = problem_cmd->add_subcommand("gen", "generate a dataset CSV");
  std::string kind = "lasso";
  std::uint64_t p_d = 0, p_s = 0, p_n = 0, seed = 1;
  double p_sigma = -1.0, p_eta = -1.0, p_reg = -1.0, p_radius = 0.0;
  gen->add_option("--kind", kind, "lasso|svm|absquad|quad")->required();
  gen->add_option("--d", p_d, "dimension");
  gen->add_option("--s", p_s, "sparsity (lasso)");
  gen->add_option("--n", p_n, "sample count");
  gen->add_option("--sigma", p_sigma, "noise scale");
  gen->add_option("--eta", p_eta, "label noise (svm)");
  gen->add_option("--reg", p_reg, "regularization weight");
  gen->add_option("--radius", p_radius, "feasible ball radius");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output CSV")->required();

  // run
  auto* run_cmd = app.add_subcommand("run", "run SGD and write a trace or ensemble CSV");
  std::string problem_spec = "absquad", schedule_spec = "strong_modified:lambda=1";
  std::string x1_text;
  std::uint32_t n_seeds = 1;
  int threads = default_threads;
  bool deterministic = false;
  std::uint64_t fstar_budget = 0;
  run_cmd->add_option("--problem", problem_spec, "problem spec or dataset path");
  run_cmd->add_option("--schedule", schedule_spec, "schedule spec");
  run_cmd->add_option("--T", horizon, "horizon")->required();
  run_cmd->add_option("--seed", seed, "run seed (first seed for ensembles)");
  run_cmd->add_option("--seeds", n_seeds, "number of seeds (>1 writes an ensemble CSV)");
  run_cmd->add_option("--x1", x1_text, "start point as comma-separated values");
  run_cmd->add_flag("--deterministic", deterministic, "use the mean subgradient (plain GD)");
  run_cmd->add_option("--fstar-budget", fstar_budget, "reference-optimum budget (default 10*T)");
  run_cmd->add_option("--threads", threads, "worker threads");
  run_cmd->add_option("--out", out_path, "output CSV")->required();

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "paired-seed method comparison");
  std::string methods_text =
      "strong_modified:lambda=0.1/last; harmonic:lambda=0.1/last; "
      "strong_modified:lambda=0.1/suffix_quarter";
  std::uint64_t seed0 = 0;
  std::uint32_t curve_points = 0;
  exp_cmd->add_option("--problem", problem_spec, "problem spec or dataset path");
  exp_cmd->add_option("--methods", methods_text, "semicolon list of <schedule>/<averaging>");
  exp_cmd->add_option("--T", horizon, "horizon");
  exp_cmd->add_option("--seeds", n_seeds, "seeds per method (paired)");
  exp_cmd->add_option("--seed0", seed0, "first seed");
  exp_cmd->add_option("--curve_points", curve_points, "log-spaced curve points (0 = every t)");
  exp_cmd->add_option("--threads", threads, "worker threads");
  exp_cmd->add_option("--out", out_path, "output CSV")->required();

  // ratefit
  auto* rate_cmd = app.add_subcommand("ratefit", "log-log convergence slope over a horizon grid");
  std::string horizons_text = "1024,4096,16384,65536";
  rate_cmd->add_option("--problem", problem_spec, "problem spec or dataset path");
  rate_cmd->add_option("--schedule", schedule_spec, "schedule spec");
  rate_cmd->add_option("--Ts", horizons_text, "comma-separated horizons");
  rate_cmd->add_option("--seeds", n_seeds, "seeds per horizon");
  rate_cmd->add_option("--seed", seed, "first seed");
  rate_cmd->add_option("--threads", threads, "worker threads");
  rate_cmd->add_option("--out", out_path, "output CSV")->required();

  // certify
  auto* cert_cmd = app.add_subcommand("certify", "numerical inequality certificates");
  std::string suite = "breakpoints";
  std::uint64_t dense_max = 4096, t0 = 0, t1 = 0;
  std::uint32_t dyadic_max = 20, n_configs = 1000;
  std::string ranges_text = "2,10,1000,100000,1000000";
  std::string etas_text = "0.25,0.5,1,2,4";
  cert_cmd->add_option("--suite", suite,
                       "breakpoints|weights|kappa|lookahead|tail|transfer")->required();
  cert_cmd->add_option("--Tmax", dense_max, "dense horizon sweep bound (breakpoints)");
  cert_cmd->add_option("--dyadic", dyadic_max, "max dyadic exponent (breakpoints)");
  cert_cmd->add_option("--ranges", ranges_text, "window lengths (weights)");
  cert_cmd->add_option("--configs", n_configs, "random configurations (kappa)");
  cert_cmd->add_option("--problem", problem_spec, "problem spec (lookahead/tail/transfer)");
  cert_cmd->add_option("--schedule", schedule_spec, "schedule spec (lookahead/tail/transfer)");
  cert_cmd->add_option("--T", horizon, "horizon (lookahead/tail/transfer)");
  cert_cmd->add_option("--t0", t0, "window start (default T/2)");
  cert_cmd->add_option("--t1", t1, "window end (default T)");
  cert_cmd->add_option("--etas", etas_text, "tail grid in units of 8 alpha_t0^2 G^2");
  cert_cmd->add_option("--seeds", n_seeds, "Monte-Carlo seeds");
  cert_cmd->add_option("--seed", seed, "first seed");
  cert_cmd->add_option("--threads", threads, "worker threads");
  cert_cmd->add_option("--out", out_path, "report CSV");

  // lowerbound
  auto* lb_cmd = app.add_subcommand("lowerbound", "infinite-horizon failure diagnostics");
  lb_cmd->require_subcommand(1);
  std::string gamma_family = "invt";
  double gamma_scale = 1.0, c0 = 10.0, d0 = 0.1, growth = 1.2;
  std::uint32_t k_min = 4, k_max = 12, n_trials = 4000, max_level = 20, window = 5,
                min_level = 4;
  auto* lb_rec = lb_cmd->add_subcommand("recursion", "exact second-moment recursion");
  lb_rec->add_option("--gamma", gamma_family, "invt|invsqrt|exp2|invtlogt|constant");
  lb_rec->add_option("--scale", gamma_scale, "step multiplier");
  lb_rec->add_option("--T", horizon, "horizon");
  lb_rec->add_option("--out", out_path, "output CSV")->required();
  auto* lb_drift = lb_cmd->add_subcommand("drift", "adversarial drift simulation");
  lb_drift->add_option("--gamma", gamma_family, "step family");
  lb_drift->add_option("--scale", gamma_scale, "step multiplier");
  lb_drift->add_option("--T", horizon, "horizon");
  lb_drift->add_option("--seeds", n_seeds, "Monte-Carlo seeds");
  lb_drift->add_option("--seed", seed, "first seed");
  lb_drift->add_option("--threads", threads, "worker threads");
  lb_drift->add_option("--out", out_path, "output CSV")->required();
  auto* lb_events = lb_cmd->add_subcommand("events", "all-plus-run block events");
  lb_events->add_option("--kmin", k_min, "first level");
  lb_events->add_option("--kmax", k_max, "last level");
  lb_events->add_option("--trials", n_trials, "trials per level");
  lb_events->add_option("--seed", seed, "seed");
  lb_events->add_option("--out", out_path, "output CSV")->required();
  auto* lb_tri = lb_cmd->add_subcommand("trichotomy", "eta/lambda schedule diagnostics");
  lb_tri->add_option("--gamma", gamma_family, "step family");
  lb_tri->add_option("--scale", gamma_scale, "step multiplier");
  lb_tri->add_option("--K", max_level, "max dyadic level");
  lb_tri->add_option("--c0", c0, "eta threshold");
  lb_tri->add_option("--d0", d0, "lambda threshold");
  lb_tri->add_option("--window", window, "growth window");
  lb_tri->add_option("--growth", growth, "growth ratio over the window");
  lb_tri->add_option("--minlevel", min_level, "first level eligible to witness");
  lb_tri->add_option("--out", out_path, "output CSV")->required();

  // figure
  auto* fig_cmd = app.add_subcommand("figure", "render an experiment report as SVG");
  std::string in_path;
  bool logy = false;
  fig_cmd->add_option("--in", in_path, "experiment report CSV")->required();
  fig_cmd->add_option("--out", out_path, "output SVG")->required();
  fig_cmd->add_flag("--logy", logy, "log-scale objective axis");

  std::vector<std::string> merged = expand_config(argc, argv);
  std::vector<const char*> carg{argv[0]};
  for (const std::string& a : merged) carg.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(carg.size()), carg.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  if (dump->parsed()) {
    ScheduleGuard s;
    laststep_status st =
        laststep_schedule_make(family.c_str(), horizon, scale, lambda, &s.ptr);
    if (st != LASTSTEP_OK) return fail_with(st);
    st = laststep_schedule_write_csv(s.ptr, out_path.c_str());
    return st == LASTSTEP_OK ? 0 : fail_with(st);
  }

  if (gen->parsed()) {
    std::string spec = kind;
    auto append = [&spec](const char* key, const std::string& value) {
      spec += spec.find(':') == std::string::npos ? ":" : ",";
      spec += key;
      spec += "=";
      spec += value;
    };
    if (p_d) append("d", std::to_string(p_d));
    if (p_s) append("s", std::to_string(p_s));
    if (p_n) append("n", std::to_string(p_n));
    if (p_sigma >= 0.0) append("sigma", std::to_string(p_sigma));
    if (p_eta >= 0.0) append("eta", std::to_string(p_eta));
    if (p_reg >= 0.0) append("reg", std::to_string(p_reg));
    if (p_radius > 0.0) append("radius", std::to_string(p_radius));
    if (kind == "lasso" || kind == "svm") append("seed", std::to_string(seed));
    ProblemGuard p;
    laststep_status st = laststep_problem_parse(spec.c_str(), &p.ptr);
    if (st != LASTSTEP_OK) return fail_with(st);
    st = laststep_problem_write_csv(p.ptr, out_path.c_str());
    return st == LASTSTEP_OK ? 0 : fail_with(st);
  }

  if (run_cmd->parsed()) {
    ProblemGuard p;
    laststep_status st = laststep_problem_parse(problem_spec.c_str(), &p.ptr);
    if (st != LASTSTEP_OK) return fail_with(st);
    ScheduleGuard s;
    st = laststep_schedule_parse(schedule_spec.c_str(), horizon, &s.ptr);
    if (st != LASTSTEP_OK) return fail_with(st);
    double f_star = 0.0;
    st = laststep_problem_optimum(p.ptr, fstar_budget ? fstar_budget : 10 * horizon, &f_star);
    if (st != LASTSTEP_OK) return fail_with(st);
    if (n_seeds > 1) {
      laststep_ensemble* e = nullptr;
      st = laststep_ensemble_run(p.ptr, s.ptr, n_seeds, seed, f_star, threads, &e);
      if (st != LASTSTEP_OK) return fail_with(st);
      st = laststep_ensemble_write_csv(e, out_path.c_str());
      laststep_ensemble_free(e);
      return st == LASTSTEP_OK ? 0 : fail_with(st);
    }
    std::vector<double> x1 = parse_double_list(x1_text);
    laststep_trace* trace = nullptr;
    st = laststep_run(p.ptr, s.ptr, x1.empty() ? nullptr : x1.data(), x1.size(), seed, 0,
                      deterministic ? 1 : 0, &trace);
    if (st != LASTSTEP_OK) return fail_with(st);
    st = laststep_trace_write_csv(trace, f_star, out_path.c_str());
    laststep_trace_free(trace);
    return st == LASTSTEP_OK ? 0 : fail_with(st);
  }

  if (exp_cmd->parsed()) {
    std::string config;
    config += "problem = " + problem_spec + "\n";
    config += "T = " + std::to_string(horizon) + "\n";
    config += "seeds = " + std::to_string(n_seeds) + "\n";
    config += "seed0 = " + std::to_string(seed0) + "\n";
    config += "curve_points = " + std::to_string(curve_points) + "\n";
    config += "methods = " + methods_text + "\n";
    laststep_status st = laststep_experiment_run(config.c_str(), threads, out_path.c_str());
    return st == LASTSTEP_OK ? 0 : fail_with(st);
  }

  if (rate_cmd->parsed()) {
    std::vector<std::uint64_t> horizons = parse_u64_list(horizons_text);
    double slope = 0, lo = 0, hi = 0, ratio = 0;
    laststep_status st = laststep_ratefit_run(problem_spec.c_str(), schedule_spec.c_str(),
                                              horizons.data(), horizons.size(), n_seeds, seed,
                                              threads, out_path.c_str(), &slope, &lo, &hi,
                                              &ratio);
    if (st != LASTSTEP_OK) return fail_with(st);
    std::printf("slope=%.4f ci=[%.4f,%.4f] max_bound_ratio=%.4g\n", slope, lo, hi, ratio);
    return 0;
  }

  if (cert_cmd->parsed()) {
    if (!t0) t0 = horizon / 2;
    if (!t1) t1 = horizon;
    ReportGuard report;
    laststep_status st = LASTSTEP_ERR_BAD_CONFIG;
    std::string config = "suite=" + suite;
    if (suite == "breakpoints") {
      st = laststep_certify_breakpoints(dense_max, dyadic_max, &report.ptr);
    } else if (suite == "weights") {
      std::vector<std::uint64_t> ranges = parse_u64_list(ranges_text);
      st = laststep_certify_weights(ranges.data(), ranges.size(), &report.ptr);
    } else if (suite == "kappa") {
      st = laststep_certify_kappa(n_configs, seed, &report.ptr);
    } else {
      ProblemGuard p;
      st = laststep_problem_parse(problem_spec.c_str(), &p.ptr);
      if (st != LASTSTEP_OK) return fail_with(st);
      ScheduleGuard s;
      st = laststep_schedule_parse(schedule_spec.c_str(), horizon, &s.ptr);
      if (st != LASTSTEP_OK) return fail_with(st);
      config += ",problem=" + problem_spec + ",schedule=" + schedule_spec;
      if (suite == "lookahead") {
        st = laststep_certify_lookahead(p.ptr, s.ptr, t0, t1, n_seeds, seed, threads,
                                        &report.ptr);
      } else if (suite == "tail") {
        std::vector<double> etas = parse_double_list(etas_text);
        st = laststep_certify_tail(p.ptr, s.ptr, t0, t1, etas.data(), etas.size(), n_seeds,
                                   seed, threads, &report.ptr);
      } else if (suite == "transfer") {
        st = laststep_certify_transfer(p.ptr, s.ptr, n_seeds, seed, threads, &report.ptr);
      } else {
        std::fprintf(stderr, "error: unknown suite '%s'\n", suite.c_str());
        return 1;
      }
    }
    if (st != LASTSTEP_OK) return fail_with(st);
    return print_report(report.ptr, config, out_path);
  }

  if (lb_rec->parsed() || lb_drift->parsed() || lb_tri->parsed()) {
    const std::uint64_t len = lb_tri->parsed()
                                  ? (std::uint64_t(1) << (max_level + 1)) - 1
                                  : horizon;
    std::vector<double> gamma;
    if (!build_gamma(gamma_family, gamma_scale, len, gamma)) {
      std::fprintf(stderr, "error: unknown gamma family '%s'\n", gamma_family.c_str());
      return 1;
    }
    int all_pass = 0;
    laststep_status st;
    if (lb_rec->parsed())
      st = laststep_lb_recursion_csv(gamma.data(), len, out_path.c_str(), &all_pass);
    else if (lb_drift->parsed())
      st = laststep_lb_drift_csv(gamma.data(), len, n_seeds, seed, threads, out_path.c_str(),
                                 &all_pass);
    else
      st = laststep_lb_trichotomy_csv(gamma.data(), len, max_level, c0, d0, window, growth,
                                      min_level, out_path.c_str(), &all_pass);
    if (st != LASTSTEP_OK) return fail_with(st);
    std::printf("%s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : 1;
  }

  if (lb_events->parsed()) {
    int all_pass = 0;
    laststep_status st =
        laststep_lb_events_csv(k_min, k_max, n_trials, seed, out_path.c_str(), &all_pass);
    if (st != LASTSTEP_OK) return fail_with(st);
    std::printf("%s\n", all_pass ? "PASS" : "FAIL");
    return all_pass ? 0 : 1;
  }

  if (fig_cmd->parsed()) {
    laststep_status st = laststep_figure_render(in_path.c_str(), out_path.c_str(), logy ? 1 : 0);
    return st == LASTSTEP_OK ? 0 : fail_with(st);
  }

  return 0;
}
