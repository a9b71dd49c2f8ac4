#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "hazardlens/csv.hpp"

namespace hazardlens {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Minimal self-contained line plot: axes, ticks, polylines, legend.
/// NaN values split a series into separate segments.
inline std::string svg_line_plot(const std::string& title,
                                 const std::vector<SvgSeries>& series,
                                 int width = 720, int height = 480) {
  static const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd",
                                 "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const double ml = 60, mr = 20, mt = 40, mb = 40;
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        any = true;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;
  double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
         "font-family='sans-serif' font-size='15'>" << title << "</text>\n";

  for (int k = 0; k <= 5; ++k) {
    double fx = xmin + (xmax - xmin) * k / 5.0;
    double fy = ymin + (ymax - ymin) * k / 5.0;
    svg << "<line x1='" << sx(fx) << "' y1='" << mt + ph << "' x2='" << sx(fx)
        << "' y2='" << mt + ph + 5 << "' stroke='black'/>\n"
        << "<text x='" << sx(fx) << "' y='" << mt + ph + 18
        << "' text-anchor='middle' font-family='sans-serif' font-size='11'>"
        << detail::format_double(std::round(fx * 1000) / 1000) << "</text>\n"
        << "<line x1='" << ml - 5 << "' y1='" << sy(fy) << "' x2='" << ml
        << "' y2='" << sy(fy) << "' stroke='black'/>\n"
        << "<text x='" << ml - 8 << "' y='" << sy(fy) + 4
        << "' text-anchor='end' font-family='sans-serif' font-size='11'>"
        << detail::format_double(std::round(fy * 1000) / 1000) << "</text>\n";
  }
  svg << "<rect x='" << ml << "' y='" << mt << "' width='" << pw
      << "' height='" << ph << "' fill='none' stroke='black'/>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % 8];
    std::ostringstream pts;
    bool open = false;
    auto flush = [&]() {
      if (open)
        svg << "<polyline points='" << pts.str()
            << "' fill='none' stroke='" << color << "' stroke-width='1.5'/>\n";
      pts.str("");
      open = false;
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
      open = true;
    }
    flush();
    svg << "<text x='" << width - mr - 150 << "' y='" << mt + 16 + 16 * si
        << "' font-family='sans-serif' font-size='12' fill='" << color << "'>"
        << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace hazardlens
