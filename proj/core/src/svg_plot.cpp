#include "vote_audit/svg_plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace vote_audit::plot {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 600.0;
constexpr double kLeft = 70.0;
constexpr double kTop = 50.0;
constexpr double kPlotSize = 480.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double px(double percent) { return kLeft + kPlotSize * percent / 100.0; }
double py(double percent) { return kTop + kPlotSize * (1.0 - percent / 100.0); }

bool plottable(const DistrictRecord& d) { return d.ballot_total > 0 && d.mail_total > 0; }

bool is_red(const DistrictRecord& d, Variant variant) {
  return d.status == DistrictStatus::red ||
         (variant == Variant::red_and_dubious && d.status == DistrictStatus::dubious);
}

}  // namespace

DisplayLine display_fit(const ElectionDataset& dataset, Variant variant) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& d : dataset.districts()) {
    if (!plottable(d) || is_red(d, variant)) continue;
    const double x = d.ballot_c1_percent();
    const double y = d.mail_c1_percent();
    n += 1;
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom <= 0.0) return {};
  const double slope = (n * sxy - sx * sy) / denom;
  return {(sy - slope * sx) / n, slope, true};
}

std::string render_scatter_svg(const ElectionDataset& dataset, const ScatterOptions& options) {
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n"
      << "<text x=\"" << num(kWidth / 2) << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << xml_escape(options.title) << "</text>\n";

  // Grid, ticks and frame.
  svg << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (int tick = 10; tick < 100; tick += 10) {
    svg << "<line x1=\"" << num(px(tick)) << "\" y1=\"" << num(py(0)) << "\" x2=\"" << num(px(tick)) << "\" y2=\""
        << num(py(100)) << "\"/>\n";
    svg << "<line x1=\"" << num(px(0)) << "\" y1=\"" << num(py(tick)) << "\" x2=\"" << num(px(100)) << "\" y2=\""
        << num(py(tick)) << "\"/>\n";
  }
  svg << "</g>\n";
  svg << "<rect class=\"frame\" x=\"" << num(px(0)) << "\" y=\"" << num(py(100)) << "\" width=\"" << num(kPlotSize)
      << "\" height=\"" << num(kPlotSize) << "\" fill=\"none\" stroke=\"black\"/>\n";
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int tick = 0; tick <= 100; tick += 20) {
    svg << "<text x=\"" << num(px(tick)) << "\" y=\"" << num(py(0) + 16) << "\" text-anchor=\"middle\">" << tick
        << "</text>\n";
    svg << "<text x=\"" << num(px(0) - 6) << "\" y=\"" << num(py(tick) + 4) << "\" text-anchor=\"end\">" << tick
        << "</text>\n";
  }
  svg << "<text x=\"" << num(px(50)) << "\" y=\"" << num(py(0) + 36)
      << "\" text-anchor=\"middle\" font-size=\"13\">candidate 1, % of ballot votes</text>\n";
  svg << "<text x=\"" << num(px(0) - 44) << "\" y=\"" << num(py(50))
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 " << num(px(0) - 44) << ' '
      << num(py(50)) << ")\">candidate 1, % of mail votes</text>\n";
  svg << "</g>\n";

  // Display fit, clipped to the unit box by sampling the visible x-range.
  const DisplayLine line = display_fit(dataset, options.variant);
  if (line.valid) {
    double x0 = 0.0, x1 = 100.0;
    if (line.slope != 0.0) {
      const double xa = (0.0 - line.intercept) / line.slope;
      const double xb = (100.0 - line.intercept) / line.slope;
      x0 = std::max(x0, std::min(xa, xb));
      x1 = std::min(x1, std::max(xa, xb));
    }
    if (x0 < x1) {
      svg << "<line class=\"display-fit\" x1=\"" << num(px(x0)) << "\" y1=\""
          << num(py(line.intercept + line.slope * x0)) << "\" x2=\"" << num(px(x1)) << "\" y2=\""
          << num(py(line.intercept + line.slope * x1)) << "\" stroke=\"#555555\" stroke-width=\"1.5\" "
          << "stroke-dasharray=\"6 3\"/>\n";
    }
  }

  // Points: green first, then contaminated on top.
  bool any_dubious = false;
  for (int pass = 0; pass < 2; ++pass) {
    svg << "<g>\n";
    for (const auto& d : dataset.districts()) {
      if (!plottable(d)) continue;
      const bool red = is_red(d, options.variant);
      if (red != (pass == 1)) continue;
      const bool dubious = d.status == DistrictStatus::dubious;
      any_dubious = any_dubious || dubious;
      svg << "<circle class=\"pt " << (red ? "red" : "green") << (dubious ? " dubious" : "") << "\" cx=\""
          << num(px(d.ballot_c1_percent())) << "\" cy=\"" << num(py(d.mail_c1_percent())) << "\" r=\"4\" fill=\""
          << (red ? "#d62728" : "#2ca02c") << "\" fill-opacity=\"0.8\"";
      if (dubious) svg << " stroke=\"black\" stroke-width=\"1.5\"";
      svg << "><title>" << xml_escape(d.district_id + " " + d.name) << "</title></circle>\n";
    }
    svg << "</g>\n";
  }

  // Legend.
  const double lx = px(0) + 12;
  double ly = py(100) + 16;
  svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  auto entry = [&](const std::string& marker, const std::string& label) {
    svg << marker << "<text x=\"" << num(lx + 12) << "\" y=\"" << num(ly + 4) << "\">" << label << "</text>\n";
    ly += 16;
  };
  entry("<circle cx=\"" + num(lx) + "\" cy=\"" + num(ly) + "\" r=\"4\" fill=\"#2ca02c\"/>", "uncontaminated");
  entry("<circle cx=\"" + num(lx) + "\" cy=\"" + num(ly) + "\" r=\"4\" fill=\"#d62728\"/>", "contaminated");
  if (any_dubious)
    entry("<circle cx=\"" + num(lx) + "\" cy=\"" + num(ly) +
              "\" r=\"4\" fill=\"white\" stroke=\"black\" stroke-width=\"1.5\"/>",
          "dubious (outlined)");
  if (line.valid)
    entry("<line x1=\"" + num(lx - 6) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 6) + "\" y2=\"" + num(ly) +
              "\" stroke=\"#555555\" stroke-dasharray=\"6 3\"/>",
          "display fit");
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace vote_audit::plot
