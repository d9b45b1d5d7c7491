// Minimal SVG plots for visual inspection of the verification runs: ECDF
// step-curve overlays (optionally with an analytic CDF curve) and density
// histograms with an analytic density overlay.
#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace flatlpp {

struct PlotSeries {
  std::string label;
  std::vector<double> sample;  // ECDF series: raw sample, sorted internally
};

struct PlotCurve {
  std::string label;
  std::function<double(double)> f;  // evaluated on the shared x-range
};

struct PlotOptions {
  int width = 720;
  int height = 460;
  std::string title;
  std::string x_label = "x";
  std::string y_label;
};

// Step ECDF per series plus optional analytic curves; throws
// std::invalid_argument when no series or an empty sample is given.
void plot_ecdf_overlay(const std::string& path, std::span<const PlotSeries> series,
                       std::span<const PlotCurve> curves, const PlotOptions& options);

// Density-normalized histogram of the sample with analytic density overlay;
// bins are equal-width over the sample range. Throws on empty input or
// bins < 1.
void plot_histogram_density(const std::string& path, std::span<const double> sample,
                            int bins, const PlotCurve& density,
                            const PlotOptions& options);

}  // namespace flatlpp
