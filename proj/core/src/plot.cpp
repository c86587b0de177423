#include "crossover/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "crossover/util.hpp"

namespace crossover {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 55;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return format_real(v, 6); }

struct Axis {
  double lo = 0, hi = 1;
  bool log = false;
  double map(double v, double a, double b) const {
    const double t = log ? (std::log10(v) - lo) / (hi - lo) : (v - lo) / (hi - lo);
    return a + t * (b - a);
  }
};

Axis make_axis(const std::vector<double>& values, bool log) {
  Axis axis;
  axis.log = log;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!std::isfinite(v) || (log && v <= 0)) continue;
    const double t = log ? std::log10(v) : v;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (log) {
    lo = std::floor(lo);
    hi = std::ceil(hi);
  } else if (lo > 0 && lo < 0.5 * hi) {
    lo = 0;
  }
  if (hi - lo < 1e-12) hi = lo + 1;
  axis.lo = lo;
  axis.hi = hi;
  return axis;
}

std::vector<double> ticks(const Axis& axis) {
  std::vector<double> out;
  if (axis.log) {
    for (double e = axis.lo; e <= axis.hi + 1e-9; e += 1) out.push_back(std::pow(10.0, e));
    return out;
  }
  const double span = axis.hi - axis.lo;
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  for (double v = std::ceil(axis.lo / step) * step; v <= axis.hi + step * 1e-9; v += step)
    out.push_back(std::abs(v) < step * 1e-9 ? 0.0 : v);
  return out;
}

bool plottable(const PlotPoint& p, const LineChart& c) {
  return std::isfinite(p.x) && std::isfinite(p.y) && (!c.log_x || p.x > 0) && (!c.log_y || p.y > 0);
}

}  // namespace

std::string render_svg(const LineChart& chart) {
  std::vector<double> xs, ys;
  for (const auto& s : chart.series) {
    for (const auto& p : s.points) {
      if (!plottable(p, chart)) continue;
      xs.push_back(p.x);
      ys.push_back(p.y);
      if (p.error > 0) {
        ys.push_back(p.y + p.error);
        if (!chart.log_y || p.y - p.error > 0) ys.push_back(p.y - p.error);
      }
    }
  }
  const Axis ax = make_axis(xs, chart.log_x);
  const Axis ay = make_axis(ys, chart.log_y);
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << esc(chart.title)
      << "</text>\n";
  svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
      << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (double t : ticks(ax)) {
    const double x = ax.map(t, x0, x1);
    svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y0 + 5)
        << "\" stroke=\"black\"/><text x=\"" << num(x) << "\" y=\"" << num(y0 + 18) << "\" text-anchor=\"middle\">"
        << num(t) << "</text>\n";
  }
  for (double t : ticks(ay)) {
    const double y = ay.map(t, y0, y1);
    svg << "<line x1=\"" << num(x0 - 5) << "\" y1=\"" << num(y) << "\" x2=\"" << num(x0) << "\" y2=\"" << num(y)
        << "\" stroke=\"black\"/><text x=\"" << num(x0 - 8) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << num(t) << "</text>\n";
  }
  svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
      << esc(chart.x_label) << "</text>\n";
  svg << "<text transform=\"translate(16," << num((y0 + y1) / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << esc(chart.y_label) << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const char* color = kColors[si % std::size(kColors)];
    std::ostringstream path;
    bool first = true;
    for (const auto& p : s.points) {
      if (!plottable(p, chart)) continue;
      const double x = ax.map(p.x, x0, x1), y = ay.map(p.y, y0, y1);
      if (p.error > 0) {
        const double top = ay.map(p.y + p.error, y0, y1);
        const double low = (!chart.log_y || p.y - p.error > 0) ? ay.map(p.y - p.error, y0, y1) : y0;
        svg << "<line x1=\"" << num(x) << "\" y1=\"" << num(top) << "\" x2=\"" << num(x) << "\" y2=\"" << num(low)
            << "\" stroke=\"" << color << "\"/>\n";
      }
      svg << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
      path << (first ? "M" : " L") << num(x) << ',' << num(y);
      first = false;
    }
    if (!s.markers_only && !first)
      svg << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << color << "\"/>\n";
    svg << "<text x=\"" << num(x1 - 10) << "\" y=\"" << num(y1 + 16 + 16 * static_cast<double>(si))
        << "\" text-anchor=\"end\" fill=\"" << color << "\">" << esc(s.label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace crossover
