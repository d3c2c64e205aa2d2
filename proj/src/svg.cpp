#include "gld/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gld {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double nice_step(double range) {
  if (range <= 0) return 1.0;
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  return step * mag;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

std::string render_line_chart(const std::vector<ChartSeries>& series,
                              const ChartConfig& cfg) {
  const double ml = 60, mr = 130, mt = 40, mb = 50;
  const double pw = cfg.width - ml - mr;
  const double ph = cfg.height - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (first) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) ymax = ymin + 1;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(cfg.width) + "\" height=\"" + std::to_string(cfg.height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(ml) + "\" y=\"22\" font-size=\"15\">" + cfg.title +
         "</text>\n";

  // axes
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" +
         num(ml + pw) + "\" y2=\"" + num(mt + ph) +
         "\" stroke=\"#333\"/>\n";
  svg += "<line x1=\"" + num(ml) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(ml) +
         "\" y2=\"" + num(mt + ph) + "\" stroke=\"#333\"/>\n";

  const double xs = nice_step(xmax - xmin);
  for (double v = std::ceil(xmin / xs) * xs; v <= xmax + 1e-9; v += xs) {
    svg += "<line x1=\"" + num(px(v)) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" +
           num(px(v)) + "\" y2=\"" + num(mt + ph + 5) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + num(px(v)) + "\" y=\"" + num(mt + ph + 18) +
           "\" text-anchor=\"middle\">" + tick_label(v) + "</text>\n";
  }
  const double ys = nice_step(ymax - ymin);
  for (double v = std::ceil(ymin / ys) * ys; v <= ymax + 1e-9; v += ys) {
    svg += "<line x1=\"" + num(ml - 5) + "\" y1=\"" + num(py(v)) + "\" x2=\"" +
           num(ml) + "\" y2=\"" + num(py(v)) + "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + num(ml - 8) + "\" y=\"" + num(py(v) + 4) +
           "\" text-anchor=\"end\">" + tick_label(v) + "</text>\n";
  }
  svg += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(cfg.height - 10.0) +
         "\" text-anchor=\"middle\">" + cfg.x_label + "</text>\n";
  svg += "<text x=\"16\" y=\"" + num(mt + ph / 2) +
         "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         num(mt + ph / 2) + ")\">" + cfg.y_label + "</text>\n";

  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    std::string points;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!points.empty()) points.push_back(' ');
      points += num(px(s.x[i])) + "," + num(py(s.y[i]));
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = mt + 14.0 * static_cast<double>(si);
    svg += "<line x1=\"" + num(ml + pw + 8) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(ml + pw + 28) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + num(ml + pw + 32) + "\" y=\"" + num(ly + 4) + "\">" +
           s.label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace gld
