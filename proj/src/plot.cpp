#include "flatlpp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "flatlpp/report.hpp"

namespace flatlpp {

namespace {

constexpr const char* kColors[] = {"#1f6fb2", "#d1495b", "#3a8f5f",
                                   "#8a5fbf", "#c98a2b", "#4a4a4a"};
constexpr int kMarginLeft = 62;
constexpr int kMarginRight = 18;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 48;

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  int width, height;

  double px(double x) const {
    return kMarginLeft + (x - x0) / (x1 - x0) * (width - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return height - kMarginBottom -
           (y - y0) / (y1 - y0) * (height - kMarginTop - kMarginBottom);
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

void open_svg(std::ostringstream& out, const PlotOptions& o) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << o.width
      << "\" height=\"" << o.height << "\" viewBox=\"0 0 " << o.width << ' '
      << o.height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty()) {
    out << "<text x=\"" << o.width / 2
        << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << o.title << "</text>\n";
  }
}

void draw_axes(std::ostringstream& out, const Frame& f, const PlotOptions& o) {
  const double left = kMarginLeft, bottom = f.height - kMarginBottom;
  const double right = f.width - kMarginRight, top = kMarginTop;
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << right - left
      << "\" height=\"" << bottom - top
      << "\" fill=\"none\" stroke=\"#303030\" stroke-width=\"1\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 5.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 5.0;
    const double xp = f.px(xv), yp = f.py(yv);
    out << "<line x1=\"" << xp << "\" y1=\"" << bottom << "\" x2=\"" << xp
        << "\" y2=\"" << bottom + 5 << "\" stroke=\"#303030\"/>\n"
        << "<text x=\"" << xp << "\" y=\"" << bottom + 19
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(xv) << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << yp << "\" x2=\"" << left
        << "\" y2=\"" << yp << "\" stroke=\"#303030\"/>\n"
        << "<text x=\"" << left - 8 << "\" y=\"" << yp + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(yv) << "</text>\n";
  }
  if (!o.x_label.empty()) {
    out << "<text x=\"" << (left + right) / 2 << "\" y=\"" << f.height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << o.x_label << "</text>\n";
  }
  if (!o.y_label.empty()) {
    out << "<text x=\"16\" y=\"" << (top + bottom) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 "
        << (top + bottom) / 2 << ")\">" << o.y_label << "</text>\n";
  }
}

void draw_legend(std::ostringstream& out, const Frame& f,
                 const std::vector<std::string>& labels) {
  double y = kMarginTop + 16;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double x = f.width - kMarginRight - 170;
    out << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 24
        << "\" y2=\"" << y - 4 << "\" stroke=\"" << kColors[i % 6]
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << x + 30 << "\" y=\"" << y
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << labels[i]
        << "</text>\n";
    y += 18;
  }
}

void draw_polyline(std::ostringstream& out, const Frame& f,
                   const std::vector<std::pair<double, double>>& pts,
                   const char* color) {
  out << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.6\" points=\"";
  for (const auto& [x, y] : pts) out << f.px(x) << ',' << f.py(y) << ' ';
  out << "\"/>\n";
}

}  // namespace

void plot_ecdf_overlay(const std::string& path, std::span<const PlotSeries> series,
                       std::span<const PlotCurve> curves, const PlotOptions& options) {
  if (series.empty()) throw std::invalid_argument("ecdf plot needs at least one series");
  double lo = 0, hi = 0;
  bool first = true;
  std::vector<std::vector<double>> sorted;
  for (const PlotSeries& s : series) {
    if (s.sample.empty())
      throw std::invalid_argument("ecdf plot: empty sample in series " + s.label);
    sorted.emplace_back(s.sample);
    std::sort(sorted.back().begin(), sorted.back().end());
    lo = first ? sorted.back().front() : std::min(lo, sorted.back().front());
    hi = first ? sorted.back().back() : std::max(hi, sorted.back().back());
    first = false;
  }
  if (hi <= lo) hi = lo + 1.0;
  const double pad = 0.03 * (hi - lo);
  Frame f{lo - pad, hi + pad, 0.0, 1.0, options.width, options.height};

  std::ostringstream out;
  open_svg(out, options);
  PlotOptions o = options;
  if (o.y_label.empty()) o.y_label = "F(x)";
  draw_axes(out, f, o);
  std::vector<std::string> labels;
  int color = 0;
  for (std::size_t s = 0; s < sorted.size(); ++s) {
    const auto& v = sorted[s];
    const double n = static_cast<double>(v.size());
    std::vector<std::pair<double, double>> pts;
    pts.reserve(2 * v.size() + 2);
    pts.emplace_back(f.x0, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      pts.emplace_back(v[i], i / n);
      pts.emplace_back(v[i], (i + 1) / n);
    }
    pts.emplace_back(f.x1, 1.0);
    draw_polyline(out, f, pts, kColors[color % 6]);
    labels.push_back(series[s].label);
    ++color;
  }
  for (const PlotCurve& c : curves) {
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i <= 400; ++i) {
      const double x = f.x0 + (f.x1 - f.x0) * i / 400.0;
      pts.emplace_back(x, std::clamp(c.f(x), 0.0, 1.0));
    }
    draw_polyline(out, f, pts, kColors[color % 6]);
    labels.push_back(c.label);
    ++color;
  }
  draw_legend(out, f, labels);
  out << "</svg>\n";
  write_text_atomic(path, out.str());
}

void plot_histogram_density(const std::string& path, std::span<const double> sample,
                            int bins, const PlotCurve& density,
                            const PlotOptions& options) {
  if (sample.empty()) throw std::invalid_argument("histogram plot: empty sample");
  if (bins < 1) throw std::invalid_argument("histogram plot: bins < 1");
  const auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  double lo = *lo_it, hi = *hi_it;
  if (hi <= lo) hi = lo + 1.0;
  const double w = (hi - lo) / bins;
  std::vector<double> dens(static_cast<std::size_t>(bins), 0.0);
  for (double x : sample) {
    int b = std::min(bins - 1, static_cast<int>((x - lo) / w));
    dens[static_cast<std::size_t>(b)] += 1.0;
  }
  for (double& d : dens) d /= sample.size() * w;

  std::vector<std::pair<double, double>> curve;
  double ymax = 0.0;
  for (double d : dens) ymax = std::max(ymax, d);
  for (int i = 0; i <= 400; ++i) {
    const double x = lo + (hi - lo) * i / 400.0;
    const double y = density.f(x);
    curve.emplace_back(x, y);
    ymax = std::max(ymax, y);
  }
  Frame f{lo, hi, 0.0, ymax * 1.08, options.width, options.height};

  std::ostringstream out;
  open_svg(out, options);
  PlotOptions o = options;
  if (o.y_label.empty()) o.y_label = "density";
  draw_axes(out, f, o);
  for (int b = 0; b < bins; ++b) {
    const double x = lo + b * w;
    const double d = dens[static_cast<std::size_t>(b)];
    out << "<rect x=\"" << f.px(x) << "\" y=\"" << f.py(d) << "\" width=\""
        << f.px(x + w) - f.px(x) << "\" height=\"" << f.py(0.0) - f.py(d)
        << "\" fill=\"#9ec4e0\" stroke=\"#5a8db5\" stroke-width=\"0.5\"/>\n";
  }
  draw_polyline(out, f, curve, kColors[1]);
  draw_legend(out, f, {"sample", density.label});
  out << "</svg>\n";
  write_text_atomic(path, out.str());
}

}  // namespace flatlpp
