#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "laststep/csv.hpp"
#include "laststep/errors.hpp"
#include "laststep/harness.hpp"

namespace laststep {

namespace {

constexpr double kWidth = 880, kHeight = 520;
constexpr double kLeft = 76, kRight = 660, kTop = 24, kBottom = 470;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string name;
  std::vector<double> x, y;
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_figure(const ExperimentReport& report, bool log_y) {
  if (report.rows.empty()) fail(errc::bad_config, "figure needs a non-empty report");

  std::vector<Series> series;
  std::map<std::string, std::size_t> index;
  for (const auto& row : report.rows) {
    auto [it, fresh] = index.try_emplace(row.method, series.size());
    if (fresh) series.push_back({row.method, {}, {}});
    Series& s = series[it->second];
    double y = row.mean_objective;
    if (log_y && !(y > 0.0)) continue;  // log axis cannot place nonpositive values
    s.x.push_back(static_cast<double>(row.t));
    s.y.push_back(log_y ? std::log10(y) : y);
  }

  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  if (!(x_lo <= x_hi) || !(y_lo <= y_hi))
    fail(errc::bad_config, "figure needs at least one plottable point");
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) {  // constant series: pad so the line sits mid-plot
    y_hi += 0.5;
    y_lo -= 0.5;
  }

  auto px = [&](double x) { return kLeft + (x - x_lo) / (x_hi - x_lo) * (kRight - kLeft); };
  auto py = [&](double y) { return kBottom - (y - y_lo) / (y_hi - y_lo) * (kBottom - kTop); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
         num(kHeight) + "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
         "\" y2=\"" + num(kBottom) + "\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double fx = x_lo + (x_hi - x_lo) * i / 4.0;
    svg += "<line x1=\"" + num(px(fx)) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(px(fx)) +
           "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(px(fx)) + "\" y=\"" + num(kBottom + 20) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + num(fx) + "</text>\n";
    const double fy = y_lo + (y_hi - y_lo) * i / 4.0;
    const std::string label = log_y ? "1e" + num(fy) : num(fy);
    svg += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(py(fy)) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(py(fy)) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + num(kLeft - 9) + "\" y=\"" + num(py(fy) + 4) +
           "\" font-size=\"12\" text-anchor=\"end\">" + label + "</text>\n";
  }
  svg += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kHeight - 8) +
         "\" font-size=\"13\" text-anchor=\"middle\">iteration t</text>\n";
  svg += "<text x=\"16\" y=\"" + num((kTop + kBottom) / 2) +
         "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num((kTop + kBottom) / 2) + ")\">" + (log_y ? "objective (log10)" : "objective") +
         "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (!s.x.empty()) {
      svg += "<polyline fill=\"none\" stroke=\"";
      svg += color;
      svg += "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (i) svg += ' ';
        svg += num(px(s.x[i])) + "," + num(py(s.y[i]));
      }
      svg += "\"/>\n";
    }
    const double ly = kTop + 18.0 * static_cast<double>(si) + 10.0;
    svg += "<line x1=\"" + num(kRight + 14) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(kRight + 38) + "\" y2=\"" + num(ly) + "\" stroke=\"";
    svg += color;
    svg += "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(kRight + 44) + "\" y=\"" + num(ly + 4) + "\" font-size=\"12\">" +
           s.name + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace laststep
