#include "laststep/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "laststep/csv.hpp"
#include "laststep/errors.hpp"
#include "laststep/rng.hpp"

namespace laststep {

namespace {

using nlohmann::json;

double kv_double(const std::map<std::string, std::string>& kv, const std::string& key,
                 double fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::strtod(it->second.c_str(), nullptr);
}

std::uint64_t kv_u64(const std::map<std::string, std::string>& kv, const std::string& key,
                     std::uint64_t fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::strtoull(it->second.c_str(), nullptr, 10);
}

void reject_unknown_keys(const std::map<std::string, std::string>& kv,
                         std::initializer_list<const char*> known) {
  for (const auto& [key, value] : kv) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) fail(errc::bad_config, "unknown key '" + key + "'");
  }
}

}  // namespace

std::unique_ptr<Problem> parse_problem(const std::string& spec_or_path) {
  std::string kind = spec_or_path;
  std::string args;
  if (auto colon = spec_or_path.find(':'); colon != std::string::npos) {
    kind = spec_or_path.substr(0, colon);
    args = spec_or_path.substr(colon + 1);
  }
  if (kind == "absquad") return make_abs_quadratic();
  if (kind == "quad") return make_pure_quadratic();
  if (kind == "lasso") {
    auto kv = parse_kv_list(args);
    reject_unknown_keys(kv, {"d", "s", "n", "sigma", "reg", "seed", "radius"});
    return make_lasso(kv_u64(kv, "d", 100), kv_u64(kv, "s", 60), kv_u64(kv, "n", 80),
                      kv_double(kv, "sigma", 0.1), kv_double(kv, "reg", 0.2),
                      kv_u64(kv, "seed", 1), kv_double(kv, "radius", 0.0));
  }
  if (kind == "svm") {
    auto kv = parse_kv_list(args);
    reject_unknown_keys(kv, {"d", "n", "sigma", "eta", "reg", "seed", "radius"});
    return make_svm(kv_u64(kv, "d", 30), kv_u64(kv, "n", 500), kv_double(kv, "sigma", 5.0),
                    kv_double(kv, "eta", 1.0), kv_double(kv, "reg", 0.1), kv_u64(kv, "seed", 1),
                    kv_double(kv, "radius", 10.0));
  }
  if (std::filesystem::exists(spec_or_path)) return load_problem_csv(spec_or_path);
  fail(errc::bad_config, "unknown problem spec or missing file: " + spec_or_path);
}

void write_problem_csv(const Problem& problem, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "wb");
  if (!out) fail(errc::io_error, "cannot write " + path);
  std::fprintf(out, "# %s\n", problem.params_json().c_str());
  const std::size_t n = problem.sample_count();
  const std::size_t d = problem.dim();
  auto matrix = problem.data_matrix();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j)
      std::fprintf(out, "%s%s", j ? "," : "", format_double(matrix[i * d + j]).c_str());
    std::fputc('\n', out);
  }
  auto labels = problem.data_labels();
  for (std::size_t i = 0; i < n; ++i)
    std::fprintf(out, "%s\n", format_double(labels[i]).c_str());
  std::fclose(out);
}

std::unique_ptr<Problem> load_problem_csv(const std::string& path) {
  std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line;
  std::string header;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header.empty()) header = line.substr(line.size() > 1 && line[1] == ' ' ? 2 : 1);
      continue;
    }
    std::vector<double> row;
    for (const std::string& cell : split_csv_line(line))
      row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  if (header.empty()) fail(errc::bad_config, "missing parameter header in " + path);
  json params = json::parse(header, nullptr, false);
  if (params.is_discarded()) fail(errc::bad_config, "malformed parameter header in " + path);
  const std::string kind = params.value("kind", "");
  if (kind == "absquad") return make_abs_quadratic();
  if (kind == "quad") return make_pure_quadratic();

  if (kind != "lasso" && kind != "svm")
    fail(errc::bad_config, "unknown problem kind '" + kind + "' in " + path);
  const std::size_t n = params.at("n").get<std::size_t>();
  const std::size_t d = params.at("d").get<std::size_t>();
  if (rows.size() != 2 * n)
    fail(errc::bad_config, "expected " + std::to_string(2 * n) + " data rows in " + path);
  std::vector<double> matrix(n * d);
  std::vector<double> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != d) fail(errc::bad_config, "matrix row width mismatch in " + path);
    std::copy(rows[i].begin(), rows[i].end(), matrix.begin() + i * d);
    labels[i] = rows[n + i].at(0);
  }
  if (kind == "lasso") {
    LassoData data;
    data.n = n;
    data.d = d;
    data.A = std::move(matrix);
    data.b = std::move(labels);
    data.sigma = params.value("sigma", 0.0);
    data.reg = params.at("reg").get<double>();
    data.seed = params.value("seed", 0ull);
    return make_lasso(std::move(data), params.at("radius").get<double>());
  }
  SvmData data;
  data.n = n;
  data.d = d;
  data.A = std::move(matrix);
  data.b = std::move(labels);
  data.sigma = params.value("sigma", 0.0);
  data.eta = params.value("eta", 0.0);
  data.reg = params.at("reg").get<double>();
  data.seed = params.value("seed", 0ull);
  return make_svm(std::move(data), params.at("radius").get<double>());
}

StepSchedule parse_schedule(const std::string& spec, std::uint64_t horizon) {
  std::string name = spec;
  std::string args;
  if (auto colon = spec.find(':'); colon != std::string::npos) {
    name = spec.substr(0, colon);
    args = spec.substr(colon + 1);
  }
  auto family = family_from_name(name);
  if (!family) fail(errc::unknown_family, "unknown schedule family '" + name + "'");
  auto kv = parse_kv_list(args);
  reject_unknown_keys(kv, {"C", "lambda"});
  const double scale = kv_double(kv, "C", 1.0);
  const double lambda = kv_double(kv, "lambda", 1.0);
  switch (*family) {
    case Family::weak_modified: return weak_schedule(horizon, scale);
    case Family::strong_modified: return strong_schedule(horizon, lambda);
    case Family::custom: fail(errc::unknown_family, "custom schedules have no text form");
    default: return standard_schedule(*family, horizon, scale, lambda);
  }
}

namespace {

std::string schedule_config(const StepSchedule& sched) {
  std::string c = std::string("schedule=") + family_name(sched.family) +
                  ",T=" + std::to_string(sched.horizon);
  if (sched.scale > 0.0) c += ",C=" + format_double(sched.scale);
  if (sched.lambda > 0.0) c += ",lambda=" + format_double(sched.lambda);
  return c;
}

}  // namespace

void write_schedule_csv(const StepSchedule& sched, const std::string& path) {
  CsvWriter csv(path, schedule_config(sched));
  csv.header({"t", "alpha", "phase"});
  for (std::uint64_t t = 1; t <= sched.horizon; ++t)
    csv.row({std::to_string(t), format_double(sched.at(t)),
             std::to_string(sched.phase_of(t))});
}

void write_trace_csv(const Trace& trace, double f_star, const std::string& path) {
  char cfg[96];
  std::snprintf(cfg, sizeof(cfg), "trace,config_hash=%016llx,seed=%llu",
                static_cast<unsigned long long>(trace.config_hash),
                static_cast<unsigned long long>(trace.seed));
  CsvWriter csv(path, cfg);
  csv.header({"t", "objective", "subopt"});
  for (std::uint64_t t = 1; t <= trace.horizon(); ++t) {
    const double f = trace.objective_values[t - 1];
    csv.row({std::to_string(t), format_double(f), format_double(f - f_star)});
  }
}

void write_ensemble_csv(const EnsembleSummary& ensemble, const std::string& path) {
  char cfg[96];
  std::snprintf(cfg, sizeof(cfg), "ensemble,n_seeds=%u,seed0=%llu,f_star=%s", ensemble.n_seeds,
                static_cast<unsigned long long>(ensemble.seed0),
                format_double(ensemble.f_star).c_str());
  CsvWriter csv(path, cfg);
  csv.header({"t", "mean_subopt", "stderr", "n_seeds"});
  for (std::uint64_t t = 1; t <= ensemble.horizon(); ++t)
    csv.row({std::to_string(t), format_double(ensemble.mean_subopt[t - 1]),
             format_double(ensemble.std_err[t - 1]), std::to_string(ensemble.n_seeds)});
}

void write_report_csv(const CertificateReport& report, const std::string& config,
                      const std::string& path) {
  CsvWriter csv(path, config);
  csv.header({"check", "params", "lhs", "rhs", "margin", "pass"});
  for (const CheckResult& row : report)
    csv.row({row.check, row.params, format_double(row.lhs), format_double(row.rhs),
             format_double(row.margin), row.pass ? "1" : "0"});
}

const char* averaging_name(Averaging a) {
  switch (a) {
    case Averaging::last: return "last";
    case Averaging::suffix_quarter: return "suffix_quarter";
    case Averaging::running: return "running";
  }
  return "last";
}

std::optional<Averaging> averaging_from_name(const std::string& name) {
  if (name == "last") return Averaging::last;
  if (name == "suffix_quarter") return Averaging::suffix_quarter;
  if (name == "running") return Averaging::running;
  return std::nullopt;
}

std::string MethodSpec::label() const {
  return schedule + "/" + averaging_name(averaging);
}

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec m;
  auto slash = text.rfind('/');
  if (slash == std::string::npos) {
    m.schedule = text;
    return m;
  }
  m.schedule = text.substr(0, slash);
  auto avg = averaging_from_name(text.substr(slash + 1));
  if (!avg) fail(errc::bad_config, "unknown averaging mode in '" + text + "'");
  m.averaging = *avg;
  return m;
}

ExperimentSpec ExperimentSpec::parse(const std::string& config_text) {
  auto kv = parse_config_text(config_text);
  reject_unknown_keys(kv, {"problem", "methods", "T", "seeds", "seed0", "curve_points", "out"});
  ExperimentSpec spec;
  if (!kv.count("problem") || !kv.count("methods") || !kv.count("T"))
    fail(errc::bad_config, "experiment config needs problem, methods and T");
  spec.problem = kv["problem"];
  spec.horizon = std::strtoull(kv["T"].c_str(), nullptr, 10);
  spec.n_seeds = static_cast<std::uint32_t>(kv_u64(kv, "seeds", 1));
  spec.seed0 = kv_u64(kv, "seed0", 0);
  spec.curve_points = static_cast<std::uint32_t>(kv_u64(kv, "curve_points", 0));
  spec.out = kv.count("out") ? kv["out"] : "";
  std::stringstream methods(kv["methods"]);
  std::string item;
  while (std::getline(methods, item, ';')) {
    auto a = item.find_first_not_of(' ');
    auto b = item.find_last_not_of(' ');
    if (a == std::string::npos) continue;
    spec.methods.push_back(MethodSpec::parse(item.substr(a, b - a + 1)));
  }
  if (spec.methods.empty()) fail(errc::bad_config, "experiment config lists no methods");
  return spec;
}

std::string ExperimentSpec::to_config_text() const {
  std::string text;
  text += "problem = " + problem + "\n";
  text += "T = " + std::to_string(horizon) + "\n";
  text += "seeds = " + std::to_string(n_seeds) + "\n";
  text += "seed0 = " + std::to_string(seed0) + "\n";
  text += "curve_points = " + std::to_string(curve_points) + "\n";
  text += "methods = ";
  for (std::size_t i = 0; i < methods.size(); ++i)
    text += (i ? "; " : "") + methods[i].label();
  text += "\n";
  if (!out.empty()) text += "out = " + out + "\n";
  return text;
}

namespace {

std::vector<std::uint64_t> curve_grid(std::uint64_t horizon, std::uint32_t points) {
  std::vector<std::uint64_t> grid;
  if (points == 0 || points >= horizon) {
    grid.resize(horizon);
    for (std::uint64_t t = 1; t <= horizon; ++t) grid[t - 1] = t;
    return grid;
  }
  std::set<std::uint64_t> picked;
  const double step = std::log(static_cast<double>(horizon)) / (points - 1);
  for (std::uint32_t j = 0; j < points; ++j) {
    auto t = static_cast<std::uint64_t>(std::llround(std::exp(step * j)));
    picked.insert(std::clamp<std::uint64_t>(t, 1, horizon));
  }
  picked.insert(horizon);
  return {picked.begin(), picked.end()};
}

// objective of the chosen iterate summary at each grid point
std::vector<double> method_curve(const Problem& problem, const Trace& trace, Averaging averaging,
                                 const std::vector<std::uint64_t>& grid) {
  const std::uint64_t horizon = trace.horizon();
  std::vector<double> values(grid.size());
  if (averaging == Averaging::last) {
    for (std::size_t j = 0; j < grid.size(); ++j)
      values[j] = trace.objective_values[grid[j] - 1];
    return values;
  }
  const std::size_t d = trace.dim;
  // prefix sums of iterates make both averaging windows O(d) per grid point
  std::vector<double> prefix((horizon + 1) * d, 0.0);
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    auto xt = trace.iterate(t);
    for (std::size_t jj = 0; jj < d; ++jj)
      prefix[t * d + jj] = prefix[(t - 1) * d + jj] + xt[jj];
  }
  std::vector<double> point(d);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const std::uint64_t t = grid[j];
    std::uint64_t lo = 0;  // window (lo, t]
    if (averaging == Averaging::suffix_quarter)
      lo = static_cast<std::uint64_t>(std::ceil(0.75 * static_cast<double>(t)));
    if (lo >= t) lo = t - 1;
    const double inv = 1.0 / static_cast<double>(t - lo);
    for (std::size_t jj = 0; jj < d; ++jj)
      point[jj] = (prefix[t * d + jj] - prefix[lo * d + jj]) * inv;
    values[j] = problem.objective(point);
  }
  return values;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, int threads) {
  auto problem = parse_problem(spec.problem);
  const std::vector<std::uint64_t> grid = curve_grid(spec.horizon, spec.curve_points);

  ExperimentReport report;
  report.config_text = spec.to_config_text();
  for (const MethodSpec& method : spec.methods) {
    StepSchedule sched = parse_schedule(method.schedule, spec.horizon);
    const bool needs_iterates = method.averaging != Averaging::last;
    auto curve = [&](std::uint32_t idx) {
      RunConfig config;
      config.schedule = sched;
      config.seed = spec.seed0 + idx;  // identical draws across methods
      config.record = needs_iterates ? RecordMode::full_iterates : RecordMode::objectives_only;
      Trace trace = run_sgd(*problem, config);
      return method_curve(*problem, trace, method.averaging, grid);
    };
    CurveStats stats = ensemble_curves(spec.n_seeds, threads, curve);
    for (std::size_t j = 0; j < grid.size(); ++j)
      report.rows.push_back({method.label(), grid[j], stats.mean[j], stats.std_err[j]});
  }
  return report;
}

void write_experiment_csv(const ExperimentReport& report, const std::string& path) {
  CsvWriter csv(path, report.config_text);
  csv.header({"method", "t", "mean_objective", "stderr"});
  for (const auto& row : report.rows)
    csv.row({row.method, std::to_string(row.t), format_double(row.mean_objective),
             format_double(row.std_err)});
}

ExperimentReport read_experiment_csv(const std::string& path) {
  CsvTable table = read_csv(path);
  ExperimentReport report;
  for (const std::string& comment : table.comments) {
    json meta = json::parse(comment, nullptr, false);
    if (!meta.is_discarded() && meta.contains("config")) {
      report.config_text = meta["config"].get<std::string>();
      break;
    }
  }
  if (table.header != std::vector<std::string>{"method", "t", "mean_objective", "stderr"})
    fail(errc::bad_config, "not an experiment report: " + path);
  for (const auto& cells : table.rows) {
    if (cells.size() != 4) fail(errc::bad_config, "short row in " + path);
    report.rows.push_back({cells[0], std::strtoull(cells[1].c_str(), nullptr, 10),
                           std::strtod(cells[2].c_str(), nullptr),
                           std::strtod(cells[3].c_str(), nullptr)});
  }
  return report;
}

std::optional<double> closed_form_bound(const Problem& problem, const StepSchedule& sched) {
  const double G = problem.lipschitz_bound();
  const double D = problem.diameter();
  const double root_t = std::sqrt(static_cast<double>(sched.horizon));
  if (sched.family == Family::weak_modified)
    return 4.0 * D * D / (sched.scale * root_t) + 11.0 * G * G * sched.scale / root_t;
  if (sched.family == Family::strong_modified)
    return 130.0 * G * G / (sched.lambda * static_cast<double>(sched.horizon));
  return std::nullopt;
}

double loglog_slope(std::span<const std::uint64_t> horizons, std::span<const double> values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = std::log(static_cast<double>(horizons[i]));
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

RateFit fit_rate(const Problem& problem, const std::string& schedule_spec,
                 std::span<const std::uint64_t> horizons, std::uint32_t n_seeds,
                 std::uint64_t seed0, int threads, std::uint32_t bootstrap_reps) {
  if (horizons.size() < 4) fail(errc::bad_config, "need at least 4 horizons");
  for (std::size_t i = 0; i + 1 < horizons.size(); ++i)
    if (horizons[i] >= horizons[i + 1]) fail(errc::bad_config, "horizons must increase");

  RateFit fit;
  fit.f_star = resolve_optimum(problem, 10 * horizons.back());

  std::vector<std::vector<double>> finals;
  for (std::uint64_t horizon : horizons) {
    StepSchedule sched = parse_schedule(schedule_spec, horizon);
    std::vector<double> per_seed(n_seeds);
    ensemble_curves(n_seeds, threads, [&](std::uint32_t idx) {
      RunConfig config;
      config.schedule = sched;
      config.seed = seed0 + idx;
      Trace trace = run_sgd(problem, config);
      per_seed[idx] = trace.objective_values.back() - fit.f_star;
      return std::vector<double>{per_seed[idx]};
    });
    double mean = 0.0;
    for (double v : per_seed) mean += v;
    mean /= n_seeds;
    double var = 0.0;
    for (double v : per_seed) var += (v - mean) * (v - mean);
    const double se = n_seeds > 1 ? std::sqrt(var / (n_seeds - 1.0) / n_seeds) : 0.0;

    if (mean <= 0.0)
      fail(errc::bad_config, "nonpositive mean suboptimality at T=" + std::to_string(horizon) +
                                 "; rerun the reference optimum with a larger budget");
    if (mean < 5.0 * se) continue;  // too close to the noise floor for a log fit

    fit.horizons.push_back(horizon);
    fit.subopt.push_back(mean);
    fit.std_err.push_back(se);
    auto bound = closed_form_bound(problem, sched);
    fit.bound.push_back(bound.value_or(std::numeric_limits<double>::quiet_NaN()));
    if (bound) fit.max_bound_ratio = std::max(fit.max_bound_ratio, mean / *bound);
    finals.push_back(std::move(per_seed));
  }
  fit.final_subopt = finals;
  if (fit.horizons.size() < 2) fail(errc::bad_config, "too few horizons survive the noise filter");

  fit.slope = loglog_slope(fit.horizons, fit.subopt);

  // paired bootstrap over seeds: one resample drives every horizon
  RngStream rng(mix_seed(seed0, 0xb00757ull));
  std::vector<double> slopes;
  slopes.reserve(bootstrap_reps);
  std::vector<std::uint32_t> pick(n_seeds);
  std::vector<double> means(fit.horizons.size());
  for (std::uint32_t rep = 0; rep < bootstrap_reps; ++rep) {
    for (std::uint32_t i = 0; i < n_seeds; ++i)
      pick[i] = static_cast<std::uint32_t>(rng.next_index(n_seeds));
    bool usable = true;
    for (std::size_t h = 0; h < fit.horizons.size(); ++h) {
      double m = 0.0;
      for (std::uint32_t i : pick) m += finals[h][i];
      m /= n_seeds;
      if (m <= 0.0) usable = false;
      means[h] = m;
    }
    if (usable) slopes.push_back(loglog_slope(fit.horizons, means));
  }
  if (slopes.empty()) {
    fit.slope_lo = fit.slope_hi = fit.slope;
  } else {
    std::sort(slopes.begin(), slopes.end());
    fit.slope_lo = slopes[static_cast<std::size_t>(0.025 * (slopes.size() - 1))];
    fit.slope_hi = slopes[static_cast<std::size_t>(0.975 * (slopes.size() - 1))];
  }
  return fit;
}

void write_ratefit_csv(const RateFit& fit, const std::string& config, const std::string& path) {
  std::string cfg = config + ",slope=" + format_double(fit.slope) +
                    ",slope_lo=" + format_double(fit.slope_lo) +
                    ",slope_hi=" + format_double(fit.slope_hi) +
                    ",f_star=" + format_double(fit.f_star);
  CsvWriter csv(path, cfg);
  csv.header({"T", "mean_subopt", "stderr", "bound", "ratio"});
  for (std::size_t i = 0; i < fit.horizons.size(); ++i) {
    const double bound = fit.bound[i];
    csv.row({std::to_string(fit.horizons[i]), format_double(fit.subopt[i]),
             format_double(fit.std_err[i]), format_double(bound),
             format_double(std::isnan(bound) ? bound : fit.subopt[i] / bound)});
  }
}

std::string render_figure_from_csv(const std::string& report_csv, bool log_y) {
  return render_figure(read_experiment_csv(report_csv), log_y);
}

}  // namespace laststep
