// Statistical tests used by the verification experiments: Kolmogorov-Smirnov
// (one- and two-sample), a permutation energy-distance test for joint laws,
// a chi-square density fit, finite-difference gradients and a bootstrap
// confidence interval for the mean.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "flatlpp/rng.hpp"

namespace flatlpp {

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

// One-sample KS against a CDF; the CDF is validated to be monotone and
// within [0, 1] along the sorted sample.
KsResult ks_one_sample(std::span<const double> sample,
                       const std::function<double(double)>& cdf);

// Two-sample KS; both samples must hold at least 50 points for the
// asymptotic p-value to be meaningful.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Largest deviation between the empirical CDF of a sample and a reference
// CDF on the sample points (the KS statistic without a p-value).
double ecdf_sup_distance(std::span<const double> sample,
                         const std::function<double(double)>& cdf);

struct EnergyResult {
  double statistic = 0.0;
  double p_value = 0.0;
  int permutations = 0;
};

// Permutation test of equality in law for d-dimensional samples (rows of
// size dim) based on the energy distance.
EnergyResult energy_distance_test(std::span<const std::vector<double>> a,
                                  std::span<const std::vector<double>> b,
                                  int permutations, CounterRng& rng);

struct Chi2Result {
  double statistic = 0.0;
  double p_value = 0.0;
  int dof = 0;
};

// Chi-square fit of a sample against a density on [edges.front(),
// edges.back()]; the density is renormalized to that window, every sample
// point must fall inside it, and every bin must carry an expected count of
// at least 5.
Chi2Result chi2_density_fit(std::span<const double> sample,
                            const std::function<double(double)>& density,
                            std::span<const double> edges);

// Central finite-difference gradient; h must be positive.
std::vector<double> finite_diff_grad(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h);

struct MomentInterval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Percentile bootstrap confidence interval for the mean.
MomentInterval bootstrap_mean_ci(std::span<const double> sample, int resamples,
                                 double confidence, CounterRng& rng);

}  // namespace flatlpp
