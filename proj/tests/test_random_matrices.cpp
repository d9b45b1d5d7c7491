#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatlpp/determinantal.hpp"
#include "flatlpp/lpp.hpp"
#include "flatlpp/math_util.hpp"
#include "flatlpp/random_matrices.hpp"
#include "flatlpp/stats.hpp"
#include "flatlpp/weight_field.hpp"

using namespace flatlpp;

TEST_CASE("smallest orthogonal ensemble: chi-square law and ordering") {
  std::vector<double> one(2500);
  for (int r = 0; r < 2500; ++r) {
    one[static_cast<std::size_t>(r)] =
        sample_loe(1, 8, static_cast<std::uint64_t>(r)).front();
  }
  // X is 2 x 1 Gaussian, so X^T X is chi-square with 2 dof = Exp(1/2).
  const auto ks = ks_one_sample(
      one, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x); });
  CHECK(ks.p_value > 1e-3);
  const auto eigs = sample_loe(3, 8, 0);
  REQUIRE(eigs.size() == 3);
  CHECK(eigs[0] >= 0.0);
  CHECK(eigs[0] <= eigs[1]);
  CHECK(eigs[1] <= eigs[2]);
  CHECK(sample_loe(3, 8, 0) == eigs);
  CHECK_THROWS_AS(sample_loe(0, 8, 0), std::invalid_argument);
}

TEST_CASE("largest orthogonal eigenvalue matches four times the passage time") {
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  const int N = 1200;
  std::vector<double> lpp(N), loe(N);
  for (int r = 0; r < N; ++r) {
    const WeightField env = WeightField::flat_triangle(
        ones, WeightKind::exponential, 606, static_cast<std::uint64_t>(r));
    lpp[static_cast<std::size_t>(r)] = 4.0 * FlatLppField(env).top();
    loe[static_cast<std::size_t>(r)] =
        sample_loe(3, 707, static_cast<std::uint64_t>(r)).back();
  }
  CHECK(ks_two_sample(lpp, loe).statistic < 0.08);
}

TEST_CASE("symmetric ensemble: exponential one-dimensional law") {
  const std::vector<double> a = {0.8};
  std::vector<double> eig(2500);
  for (int r = 0; r < 2500; ++r) {
    eig[static_cast<std::size_t>(r)] =
        sample_sym_lue(a, 15, static_cast<std::uint64_t>(r)).front();
  }
  const auto ks = ks_one_sample(
      eig, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.8 * x); });
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("symmetric ensemble: pooled eigenvalue density at two rates") {
  const double a1 = 0.7, a2 = 1.3;
  const double mass = adaptive_quad_to_inf(
      [&](double x) { return sym_lue_pooled_density(a1, a2, x); }, 0.0, 1e-9);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  std::vector<double> pooled;
  const std::vector<double> a = {a1, a2};
  for (int r = 0; r < 1500; ++r) {
    for (double v : sample_sym_lue(a, 16, static_cast<std::uint64_t>(r))) {
      pooled.push_back(v);
    }
  }
  const std::vector<double> edges = {0.0, 0.3, 0.6, 0.9, 1.3,
                                     1.8, 2.4, 3.2, 4.5, 40.0};
  const auto fit = chi2_density_fit(
      pooled, [&](double x) { return sym_lue_pooled_density(a1, a2, x); },
      edges);
  CHECK(fit.p_value > 1e-3);
  CHECK_THROWS_AS(sym_lue_pooled_density(1.0, 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(sym_lue_pooled_density(-1.0, 2.0, 0.5),
                  std::invalid_argument);
}

TEST_CASE("top-eigenvalue supremum: exact law in dimension one") {
  const std::vector<double> alpha = {1.0};
  std::vector<double> refined(2500), plain(2500);
  for (int r = 0; r < 2500; ++r) {
    refined[static_cast<std::size_t>(r)] = sup_lambda_max(
        alpha, 15.0, 0.25, true, 19, static_cast<std::uint64_t>(r));
    plain[static_cast<std::size_t>(r)] = sup_lambda_max(
        alpha, 15.0, 0.25, false, 19, static_cast<std::uint64_t>(r));
  }
  const auto ks = ks_one_sample(
      refined, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-2.0 * x); });
  CHECK(ks.p_value > 1e-3);
  double mr = 0.0, mp = 0.0;
  for (int r = 0; r < 2500; ++r) {
    mr += refined[static_cast<std::size_t>(r)];
    mp += plain[static_cast<std::size_t>(r)];
  }
  CHECK(mp < mr);  // the grid supremum misses within-step excursions
  CHECK(sup_lambda_max(alpha, 15.0, 0.25, true, 19, 3) ==
        sup_lambda_max(alpha, 15.0, 0.25, true, 19, 3));
  CHECK_THROWS_AS(sup_lambda_max(alpha, 0.0, 0.25, true, 19, 0),
                  std::invalid_argument);
}

TEST_CASE("two-dimensional supremum approaches the closed-form law") {
  const std::vector<double> alpha = {1.0, 1.0};
  const DriftSpec ds = DriftSpec::equal(2, 1.0);
  const int N = 400;
  std::vector<double> sup(N);
  for (int r = 0; r < N; ++r) {
    sup[static_cast<std::size_t>(r)] = sup_lambda_max(
        alpha, 10.0, 2e-3, true, 23, static_cast<std::uint64_t>(r));
  }
  const double d = ks_one_sample(sup, [&](double x) {
                     return x <= 0.0 ? 0.0 : eval_cdf_top(ds, x);
                   }).statistic;
  CHECK(d < 0.12);
}
