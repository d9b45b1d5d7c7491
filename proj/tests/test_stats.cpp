#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatlpp/math_util.hpp"
#include "flatlpp/rng.hpp"
#include "flatlpp/stats.hpp"

using namespace flatlpp;

TEST_CASE("one-sample KS accepts the true law and rejects a shifted one") {
  CounterRng rng(5, StreamTag::scratch, 10);
  std::vector<double> u(2000);
  for (double& v : u) v = rng.uniform();
  const auto ok = ks_one_sample(u, [](double x) {
    return std::min(1.0, std::max(0.0, x));
  });
  CHECK(ok.p_value > 1e-3);
  CHECK(ok.statistic < 0.05);
  const auto bad = ks_one_sample(u, [](double x) {
    return std::min(1.0, std::max(0.0, x * x));
  });
  CHECK(bad.p_value < 1e-6);
  CHECK_THROWS_AS(
      ks_one_sample(u, [](double x) { return std::cos(5.0 * x); }),
      std::invalid_argument);
  CHECK_THROWS_AS(ks_one_sample(std::vector<double>{},
                                [](double) { return 0.5; }),
                  std::invalid_argument);
}

TEST_CASE("two-sample KS behaves under the null and the alternative") {
  CounterRng rng(6, StreamTag::scratch, 11);
  std::vector<double> a(1500), b(1500), c(1500);
  for (double& v : a) v = rng.gaussian();
  for (double& v : b) v = rng.gaussian();
  for (double& v : c) v = rng.gaussian() + 0.4;
  CHECK(ks_two_sample(a, b).p_value > 1e-3);
  CHECK(ks_two_sample(a, c).p_value < 1e-6);
  std::vector<double> tiny(10, 0.5);
  CHECK_THROWS_AS(ks_two_sample(a, tiny), std::invalid_argument);
}

TEST_CASE("ecdf sup distance on a worked example") {
  const std::vector<double> sample = {1.0, 2.0, 3.0};
  const double d = ecdf_sup_distance(sample, [](double x) { return x / 4.0; });
  CHECK(d == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("energy distance permutation test") {
  CounterRng rng(7, StreamTag::scratch, 12);
  auto draw = [&rng](double shift, int n) {
    std::vector<std::vector<double>> rows(n, std::vector<double>(2));
    for (auto& r : rows) {
      r[0] = rng.gaussian() + shift;
      r[1] = 0.5 * rng.gaussian() + r[0] * 0.3;
    }
    return rows;
  };
  const auto a = draw(0.0, 150), b = draw(0.0, 150), c = draw(0.8, 150);
  CounterRng perm(7, StreamTag::permutation, 0);
  const auto null_res = energy_distance_test(a, b, 200, perm);
  CHECK(null_res.p_value > 5e-3);
  CHECK(null_res.permutations == 200);
  CounterRng perm2(7, StreamTag::permutation, 1);
  const auto alt_res = energy_distance_test(a, c, 200, perm2);
  CHECK(alt_res.p_value <= 0.01);
  CHECK(alt_res.statistic > null_res.statistic);
  CounterRng perm3(7, StreamTag::permutation, 2);
  auto ragged = a;
  ragged.back().push_back(0.0);
  CHECK_THROWS_AS(energy_distance_test(ragged, b, 10, perm3),
                  std::invalid_argument);
}

TEST_CASE("chi-square density fit") {
  CounterRng rng(8, StreamTag::scratch, 13);
  std::vector<double> sample(3000);
  for (double& v : sample) v = rng.exponential(1.0);
  // Edges keep every expected count >= 5 at N=3000 for both densities
  // fitted below (rate 1 and rate 2).
  std::vector<double> edges = {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 20.0};
  auto density = [](double x) { return std::exp(-x); };
  const auto fit = chi2_density_fit(sample, density, edges);
  CHECK(fit.p_value > 1e-3);
  CHECK(fit.dof == static_cast<int>(edges.size()) - 2);
  // Wrong density should be rejected.
  const auto bad = chi2_density_fit(
      sample, [](double x) { return std::exp(-2.0 * x) * 2.0; }, edges);
  CHECK(bad.p_value < 1e-6);
  // A sample point outside the window is an error.
  std::vector<double> short_edges = {0.0, 0.5, 1.0};
  CHECK_THROWS_AS(chi2_density_fit(sample, density, short_edges),
                  std::invalid_argument);
  // Expected count below 5 in a bin is an error.
  std::vector<double> sparse_edges = {0.0, 1e-5, 6.0, 20.0};
  CHECK_THROWS_AS(chi2_density_fit(sample, density, sparse_edges),
                  std::invalid_argument);
}

TEST_CASE("finite difference gradient") {
  auto f = [](std::span<const double> x) {
    return x[0] * x[0] + 3.0 * x[0] * x[1] - x[1];
  };
  const std::vector<double> x0 = {0.7, -1.2};
  const auto g = finite_diff_grad(f, x0, 1e-5);
  CHECK(g[0] == doctest::Approx(2.0 * 0.7 + 3.0 * (-1.2)).epsilon(1e-8));
  CHECK(g[1] == doctest::Approx(3.0 * 0.7 - 1.0).epsilon(1e-8));
  CHECK_THROWS_AS(finite_diff_grad(f, x0, 0.0), std::invalid_argument);
}

TEST_CASE("bootstrap mean confidence interval") {
  CounterRng rng(9, StreamTag::scratch, 14);
  std::vector<double> sample(800);
  for (double& v : sample) v = rng.gaussian() + 2.0;
  CounterRng boot(9, StreamTag::scratch, 15);
  const auto ci = bootstrap_mean_ci(sample, 400, 0.95, boot);
  CHECK(ci.lo <= ci.mean);
  CHECK(ci.mean <= ci.hi);
  CHECK(ci.lo < 2.0);
  CHECK(ci.hi > 2.0);
  CHECK(ci.hi - ci.lo < 0.3);
  CHECK_THROWS_AS(bootstrap_mean_ci(sample, 5, 0.95, boot),
                  std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_mean_ci(sample, 400, 1.5, boot),
                  std::invalid_argument);
}
