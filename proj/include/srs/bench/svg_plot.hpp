#pragma once

// Minimal self-contained SVG line/marker plots.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "srs/bench/output.hpp"
#include "srs/error.hpp"

namespace srs::bench {

enum class PlotKind { PowerVsFrequency, ErrorVsFrequency, TimeVsBandwidth };

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

struct AxisSpec {
  const char* x_label;
  const char* y_label;
  bool log_y;
};

inline AxisSpec axis_spec(PlotKind kind) {
  switch (kind) {
    case PlotKind::PowerVsFrequency: return {"Frequency [THz]", "Power [dBm]", false};
    case PlotKind::ErrorVsFrequency: return {"Frequency [THz]", "Error [dB]", false};
    default: return {"Bandwidth [THz]", "Wall time [s]", true};
  }
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

// Roughly five round-number ticks covering [lo, hi].
inline std::vector<double> linear_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v == -0.0 ? 0.0 : v);
  return t;
}

}  // namespace detail

/// Renders `series` as an SVG document. Series with a single point are drawn as markers.
inline std::string render_plot(const std::vector<Series>& series, PlotKind kind, const std::string& title = "") {
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  const auto spec = detail::axis_spec(kind);
  std::size_t points = 0;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw DomainError("plot: x and y lengths differ in series '" + s.name + "'");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (spec.log_y && !(s.y[i] > 0.0)) continue;
      const double y = spec.log_y ? std::log10(s.y[i]) : s.y[i];
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
      ++points;
    }
  }
  if (points == 0) throw DomainError("plot: no data");
  if (spec.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::max(std::ceil(y_hi), y_lo + 1.0);
  } else {
    if (y_hi - y_lo < 1e-12) {
      y_lo -= 1.0;
      y_hi += 1.0;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;
  }
  if (x_hi - x_lo < 1e-12) {
    x_lo -= 1.0;
    x_hi += 1.0;
  }

  const double width = 720, height = 440, left = 80, right = 170, top = 40, bottom = 60;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * pw; };
  auto sy = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) + "\" height=\"" +
         detail::num(height) + "\" viewBox=\"0 0 " + detail::num(width) + " " + detail::num(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg += "<text x=\"" + detail::num(left + pw / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + detail::escape(title) + "</text>\n";
  }
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" stroke=\"none\" fill=\"black\">\n";
  for (double t : detail::linear_ticks(x_lo, x_hi)) {
    svg += "<line x1=\"" + detail::num(sx(t)) + "\" y1=\"" + detail::num(top) + "\" x2=\"" + detail::num(sx(t)) +
           "\" y2=\"" + detail::num(top + ph) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + detail::num(sx(t)) + "\" y=\"" + detail::num(top + ph + 16) + "\" text-anchor=\"middle\">" +
           detail::tick_label(t) + "</text>\n";
  }
  std::vector<double> y_ticks;
  if (spec.log_y) {
    for (double e = y_lo; e <= y_hi + 1e-9; e += 1.0) y_ticks.push_back(e);
  } else {
    y_ticks = detail::linear_ticks(y_lo, y_hi);
  }
  for (double t : y_ticks) {
    const std::string label = spec.log_y ? "1e" + detail::tick_label(t) : detail::tick_label(t);
    svg += "<line x1=\"" + detail::num(left) + "\" y1=\"" + detail::num(sy(t)) + "\" x2=\"" + detail::num(left + pw) +
           "\" y2=\"" + detail::num(sy(t)) + "\" stroke=\"#e0e0e0\"/>\n";
    svg += "<text x=\"" + detail::num(left - 6) + "\" y=\"" + detail::num(sy(t) + 4) + "\" text-anchor=\"end\">" +
           label + "</text>\n";
  }
  svg += "<rect x=\"" + detail::num(left) + "\" y=\"" + detail::num(top) + "\" width=\"" + detail::num(pw) +
         "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + detail::num(left + pw / 2) + "\" y=\"" + detail::num(height - 18) +
         "\" text-anchor=\"middle\" font-size=\"13\">" + spec.x_label + "</text>\n";
  svg += "<text transform=\"translate(22," + detail::num(top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" + spec.y_label + "</text>\n";
  svg += "</g>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = colors[si % 10];
    std::string pts;
    std::size_t n = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]) || (spec.log_y && !(s.y[i] > 0.0))) continue;
      const double y = spec.log_y ? std::log10(s.y[i]) : s.y[i];
      pts += detail::num(sx(s.x[i])) + "," + detail::num(sy(y)) + " ";
      ++n;
    }
    if (n == 0) continue;
    if (n > 1) {
      svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    }
    if (n <= 60) {
      std::size_t start = 0;
      while (start < pts.size()) {
        const auto comma = pts.find(',', start), space = pts.find(' ', comma);
        svg += "<circle cx=\"" + pts.substr(start, comma - start) + "\" cy=\"" +
               pts.substr(comma + 1, space - comma - 1) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        start = space + 1;
      }
    }
    const double ly = top + 14 + 18 * static_cast<double>(si);
    svg += "<line x1=\"" + detail::num(left + pw + 12) + "\" y1=\"" + detail::num(ly) + "\" x2=\"" +
           detail::num(left + pw + 34) + "\" y2=\"" + detail::num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + detail::num(left + pw + 40) + "\" y=\"" + detail::num(ly + 4) +
           "\" font-family=\"sans-serif\" font-size=\"11\">" + detail::escape(s.name) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline void emit_plot(const std::vector<Series>& series, PlotKind kind, const std::filesystem::path& path,
                      const std::string& title = "") {
  write_file_atomic(path, render_plot(series, kind, title));
}

}  // namespace srs::bench
