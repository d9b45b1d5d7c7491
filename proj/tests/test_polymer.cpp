#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatlpp/math_util.hpp"
#include "flatlpp/path_bundle.hpp"
#include "flatlpp/polymer.hpp"
#include "flatlpp/stats.hpp"
#include "flatlpp/weight_field.hpp"

using namespace flatlpp;

namespace {

// Sum over up-right paths from (i, j) to the anti-diagonal of the product of
// weights; exponential in n, used as an oracle for the recursion.
double brute_partition(const WeightField& env, int i, int j) {
  const int n = env.triangle_n();
  const double w = env.weight(i, j);
  if (i + j == n + 1) return w;
  double z = 0.0;
  if (env.contains(i, j + 1)) z += brute_partition(env, i, j + 1);
  if (env.contains(i + 1, j)) z += brute_partition(env, i + 1, j);
  return w * z;
}

}  // namespace

TEST_CASE("partition recursion equals the path-sum oracle") {
  const std::vector<double> drift = {0.7, 1.0, 1.6};
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const WeightField env =
        WeightField::flat_triangle(drift, WeightKind::inverse_gamma, 55, rep);
    const PolymerField field(env);
    CHECK(field.n() == 3);
    for (int i = 1; i <= 3; ++i)
      for (int j = 1; i + j <= 4; ++j) {
        CHECK(field.log_partition(i, j) ==
              doctest::Approx(std::log(brute_partition(env, i, j)))
                  .epsilon(1e-10));
      }
  }
  const WeightField env =
      WeightField::flat_triangle(drift, WeightKind::inverse_gamma, 55, 0);
  CHECK_THROWS_AS(PolymerField(env).log_partition(3, 2), std::out_of_range);
}

TEST_CASE("one-layer partition integral obeys the exponential functional law") {
  // For a single drifted path, 2 / integral is Gamma(2 mu) distributed, i.e.
  // the integral is twice an inverse gamma variable.
  const std::vector<double> alpha = {0.9};
  const int N = 1200;
  std::vector<double> logi(N);
  for (int r = 0; r < N; ++r) {
    logi[static_cast<std::size_t>(r)] = integrated_log_partition(
        alpha, 1.0, 0.02, 1e-8, 77, static_cast<std::uint64_t>(r));
  }
  const auto ks = ks_one_sample(logi, [](double t) {
    return inverse_gamma_cdf(1.8, std::exp(t) / 2.0);
  });
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("partition integral validates inputs and is deterministic") {
  const std::vector<double> alpha = {0.8, 1.2};
  const double a = integrated_log_partition(alpha, 1.0, 0.05, 1e-7, 3, 1);
  const double b = integrated_log_partition(alpha, 1.0, 0.05, 1e-7, 3, 1);
  const double c = integrated_log_partition(alpha, 1.0, 0.05, 1e-7, 3, 2);
  CHECK(a == b);
  CHECK(a != c);
  CHECK_THROWS_AS(integrated_log_partition(alpha, 0.0, 0.05, 1e-7, 3, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrated_log_partition(std::vector<double>{}, 1.0, 0.05,
                                           1e-7, 3, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrated_log_partition(std::vector<double>{-0.5}, 1.0,
                                           0.05, 1e-7, 3, 1),
                  std::invalid_argument);
}

TEST_CASE("inverse-temperature scan closes the gap to the grid supremum") {
  const std::vector<double> alpha = {0.7, 1.3};
  const std::vector<double> betas = {4.0, 8.0, 16.0, 32.0};
  double mean_first = 0.0, mean_last = 0.0;
  for (std::uint64_t r = 0; r < 5; ++r) {
    const PathBundle pb(2, 30.0, 5e-3, 404, r);
    const BetaScan scan = beta_scan(alpha, betas, pb);
    REQUIRE(scan.gap.size() == betas.size());
    for (std::size_t k = 0; k < betas.size(); ++k) {
      CHECK(scan.gap[k] ==
            doctest::Approx(scan.grid_sup - scan.scaled_log_partition[k])
                .epsilon(1e-12));
      CHECK(scan.gap[k] > 0.0);
    }
    mean_first += scan.gap.front();
    mean_last += scan.gap.back();
  }
  CHECK(mean_last < mean_first);
  const PathBundle small(1, 1.0, 0.1, 1, 0);
  CHECK_THROWS_AS(beta_scan(alpha, betas, small), std::invalid_argument);
  const PathBundle ok(2, 1.0, 0.1, 1, 0);
  CHECK_THROWS_AS(beta_scan(alpha, std::vector<double>{-1.0}, ok),
                  std::invalid_argument);
}
