#include <stdexcept>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "doctest.h"
#include "flatlpp/determinantal.hpp"
#include "flatlpp/math_util.hpp"
#include "flatlpp/path_bundle.hpp"
#include "flatlpp/reflected.hpp"
#include "flatlpp/rng.hpp"
#include "flatlpp/stats.hpp"

using namespace flatlpp;

TEST_CASE("bridge extremes bracket the endpoints and follow the exact law") {
  CounterRng rng(3, StreamTag::scratch, 20);
  const double a = 0.3, c = -0.2, var = 0.5;
  std::vector<double> mins(3000);
  for (double& m : mins) {
    const double u = rng.uniform();
    m = bridge_min(a, c, var, u);
    CHECK(m <= std::min(a, c) + 1e-12);
    CHECK(bridge_max(a, c, var, u) >= std::max(a, c) - 1e-12);
  }
  // P(min <= m) = exp(-2 (a-m)(c-m) / var) for m below both endpoints.
  const auto ks = ks_one_sample(mins, [&](double m) {
    if (m >= std::min(a, c)) return 1.0;
    return std::exp(-2.0 * (a - m) * (c - m) / var);
  });
  CHECK(ks.p_value > 1e-3);
  CHECK_THROWS_AS(bridge_min(0.0, 1.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("path bundles are reproducible with unit-variance increments") {
  const PathBundle pb(2, 4.0, 0.01, 17, 5);
  const PathBundle pb2(2, 4.0, 0.01, 17, 5);
  CHECK(pb.steps() == 400);
  CHECK(pb.cum(0, 0) == 0.0);
  CHECK(pb.cum(1, pb.steps()) == pb2.cum(1, pb.steps()));
  CHECK(pb.bridge_uniform(1, 7) == pb2.bridge_uniform(1, 7));
  CHECK(pb.bridge_uniform(1, 7) > 0.0);
  CHECK(pb.bridge_uniform(1, 7) < 1.0);
  double s2 = 0.0;
  int cnt = 0;
  for (int m = 0; m < 2; ++m)
    for (int k = 1; k <= pb.steps(); ++k) {
      const double d = pb.cum(m, k) - pb.cum(m, k - 1);
      s2 += d * d;
      ++cnt;
    }
  CHECK(s2 / cnt == doctest::Approx(0.01).epsilon(0.15));
  CHECK_THROWS_AS(PathBundle(0, 1.0, 0.1, 1, 0), std::invalid_argument);
}

TEST_CASE("wall system stays ordered and the final state matches") {
  const std::vector<double> alpha = {0.7, 1.0, 1.6};
  const PathBundle pb(3, 5.0, 0.01, 7, 3);
  for (bool refined : {false, true}) {
    const auto traj =
        refined ? wall_trajectory_refined(pb, alpha) : wall_trajectory(pb, alpha);
    REQUIRE(static_cast<int>(traj.size()) == pb.steps() + 1);
    for (const auto& row : traj) {
      CHECK(row[0] >= 0.0);
      CHECK(row[1] >= row[0]);
      CHECK(row[2] >= row[1]);
    }
    CHECK(wall_final(pb, alpha, refined) == traj.back());
  }
  CHECK_THROWS_AS(wall_final(pb, std::vector<double>{}, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(wall_final(PathBundle(1, 1.0, 0.1, 1, 0), alpha, false),
                  std::invalid_argument);
}

TEST_CASE("single reflected particle: exact sampler at coarse steps") {
  const std::vector<double> alpha = {1.0};
  std::vector<double> refined(3000), plain(3000);
  for (int r = 0; r < 3000; ++r) {
    const PathBundle pb(1, 15.0, 0.05, 99, static_cast<std::uint64_t>(r));
    refined[static_cast<std::size_t>(r)] = wall_final(pb, alpha, true)[0];
    plain[static_cast<std::size_t>(r)] = wall_final(pb, alpha, false)[0];
    // With the same driving path the refined value dominates the grid value.
    CHECK(refined[static_cast<std::size_t>(r)] >=
          plain[static_cast<std::size_t>(r)] - 1e-12);
  }
  const auto ks = ks_one_sample(
      refined, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-2.0 * x); });
  CHECK(ks.p_value > 1e-3);
  double mr = 0.0, mp = 0.0;
  for (double v : refined) mr += v;
  for (double v : plain) mp += v;
  CHECK(mp / 3000 < mr / 3000 - 0.02);  // grid sampler is biased low
}

TEST_CASE("supremum array: free bottom layer and ordered layers") {
  const std::vector<double> alpha = {0.7, 1.0, 1.6};
  const PathBundle pb(3, 6.0, 0.01, 13, 1);
  const auto z = z_array_final(pb, alpha);
  REQUIRE(z.size() == 4);
  for (int k = 1; k <= 3; ++k) {
    REQUIRE(static_cast<int>(z[k].size()) == k + 1);
    for (int j = 2; j <= k; ++j) CHECK(z[k][j] >= z[k][j - 1]);
    // Layer 1 never reflects: it is the drifted endpoint of its component.
    const int m = 3 - k + 1;  // driving component of Z_1^k (1-based)
    const double endpoint =
        pb.cum(m - 1, pb.steps()) - alpha[static_cast<std::size_t>(k - 1)] * 6.0;
    CHECK(z[k][1] == doctest::Approx(endpoint).epsilon(1e-12));
  }
}

TEST_CASE("slopes of the supremum array approach the drift minima") {
  const std::vector<double> alpha = {0.7, 1.0, 1.6};
  const PathBundle pb(3, 300.0, 0.01, 11, 0);
  const auto z = z_array_final(pb, alpha);
  for (int k = 1; k <= 3; ++k)
    for (int j = 1; j <= k; ++j) {
      double expect = alpha[static_cast<std::size_t>(k - 1)];
      for (int l = k - j + 1; l <= k; ++l)
        expect = std::min(expect, alpha[static_cast<std::size_t>(l - 1)]);
      CHECK(std::abs(z[k][j] / 300.0 + expect) < 0.2);
    }
}

TEST_CASE("running supremum of the top layer: exact one-dimensional law") {
  const std::vector<double> alpha = {1.0};
  std::vector<double> refined(3000), plain(3000);
  for (int r = 0; r < 3000; ++r) {
    const PathBundle pb(1, 15.0, 0.25, 123, static_cast<std::uint64_t>(r));
    refined[static_cast<std::size_t>(r)] = z_top_running_sup(pb, alpha, true);
    plain[static_cast<std::size_t>(r)] = z_top_running_sup(pb, alpha, false);
    // Manual grid supremum of the drifted path for the plain version.
    double manual = 0.0;
    for (int k = 1; k <= pb.steps(); ++k) {
      manual = std::max(manual, pb.cum(0, k) - pb.time(k));
    }
    CHECK(plain[static_cast<std::size_t>(r)] ==
          doctest::Approx(manual).epsilon(1e-12));
    CHECK(refined[static_cast<std::size_t>(r)] >=
          plain[static_cast<std::size_t>(r)] - 1e-12);
  }
  const auto ks = ks_one_sample(
      refined, [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-2.0 * x); });
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("refined top supremum converges to the closed-form law") {
  const std::vector<double> alpha = {1.0, 1.0};
  const DriftSpec ds = DriftSpec::equal(2, 1.0);
  std::vector<double> refined(1200), plain(1200);
  for (int r = 0; r < 1200; ++r) {
    const PathBundle pb(2, 20.0, 5e-3, 2024, static_cast<std::uint64_t>(r));
    refined[static_cast<std::size_t>(r)] = z_top_running_sup(pb, alpha, true);
    plain[static_cast<std::size_t>(r)] = z_top_running_sup(pb, alpha, false);
  }
  auto cdf = [&](double x) { return x <= 0.0 ? 0.0 : eval_cdf_top(ds, x); };
  const double d_ref = ks_one_sample(refined, cdf).statistic;
  const double d_plain = ks_one_sample(plain, cdf).statistic;
  CHECK(d_ref < d_plain);
  CHECK(d_ref < 0.08);
}

TEST_CASE("down-right sets validate their closure") {
  const DownRightSet full = DownRightSet::full_triangle(3);
  CHECK(full.cells().size() == 6);
  CHECK(full.contains(1, 3));
  CHECK(!full.contains(2, 3));
  CHECK_THROWS_AS(DownRightSet(3, {{1, 3}, {2, 2}, {3, 1}, {1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DownRightSet(2, {{1, 1}, {1, 2}, {2, 1}, {1, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DownRightSet(2, {{2, 2}}), std::invalid_argument);
}

TEST_CASE("drift, potential and divergence identities at random states") {
  const std::vector<double> alpha = {0.7, 1.0, 1.6};
  const DownRightSet full = DownRightSet::full_triangle(3);
  CounterRng rng(5, StreamTag::scratch, 0);
  for (int trial = 0; trial < 5; ++trial) {
    XArrayState st(3);
    for (auto [i, j] : full.cells()) st.at(i, j) = rng.gaussian();
    const DriftPotential dp = drift_and_potential(alpha, st, full);
    double dot = 0.0;
    for (std::size_t c = 0; c < dp.forward.size(); ++c) {
      CHECK(std::abs(dp.forward[c] + dp.reversed[c] + dp.grad_v[c]) < 1e-12);
      CHECK(dp.diff[c] ==
            doctest::Approx(dp.forward[c] - dp.reversed[c]).epsilon(1e-12));
      dot += dp.diff[c] * dp.grad_v[c];
    }
    CHECK(std::abs(dot) < 1e-10);
    CHECK(divergence_d(alpha, st, full) == 0.0);
    // Finite differences confirm the gradient and the vanishing divergence.
    const double h = 1e-5;
    double fd_div = 0.0;
    for (std::size_t c = 0; c < full.cells().size(); ++c) {
      const auto [i, j] = full.cells()[c];
      XArrayState p = st, m = st;
      p.at(i, j) += h;
      m.at(i, j) -= h;
      fd_div += (drift_and_potential(alpha, p, full).diff[c] -
                 drift_and_potential(alpha, m, full).diff[c]) /
                (2.0 * h);
      const double fd_grad = (drift_and_potential(alpha, p, full).v -
                              drift_and_potential(alpha, m, full).v) /
                             (2.0 * h);
      CHECK(std::abs(fd_grad - dp.grad_v[c]) < 1e-6);
    }
    CHECK(std::abs(fd_div) < 1e-6);
  }
}

TEST_CASE("removing one vertex shifts potential and drift by the star terms") {
  const std::vector<double> alpha = {0.7, 1.0, 1.6};
  const DownRightSet full = DownRightSet::full_triangle(3);
  std::vector<std::pair<int, int>> cs;
  for (auto c : full.cells())
    if (c != std::make_pair(1, 1)) cs.push_back(c);
  const DownRightSet sub(3, cs);
  CounterRng rng(6, StreamTag::scratch, 1);
  XArrayState st(3);
  for (auto [i, j] : full.cells()) st.at(i, j) = 0.5 * rng.gaussian();

  const DriftPotential dp_full = drift_and_potential(alpha, st, full);
  const DriftPotential dp_sub = drift_and_potential(alpha, st, sub);
  CHECK(std::abs((dp_full.v - dp_sub.v) - vstar(alpha, st, 1, 1)) < 1e-12);

  std::map<std::pair<int, int>, double> dfull, dsub, gfull, gsub;
  for (std::size_t c = 0; c < full.cells().size(); ++c) {
    dfull[full.cells()[c]] = dp_full.diff[c];
    gfull[full.cells()[c]] = dp_full.grad_v[c];
  }
  for (std::size_t c = 0; c < sub.cells().size(); ++c) {
    dsub[sub.cells()[c]] = dp_sub.diff[c];
    gsub[sub.cells()[c]] = dp_sub.grad_v[c];
  }
  const auto ds = dstar_components(alpha, st, 1, 1);
  const auto gs = vstar_grad(alpha, st, 1, 1);
  for (const auto& [cell, val] : dfull) {
    double expect = dsub.count(cell) ? dsub[cell] : 0.0;
    if (cell == std::make_pair(1, 1)) expect += ds[0];
    if (cell == std::make_pair(1, 2)) expect += ds[1];
    if (cell == std::make_pair(2, 1)) expect += ds[2];
    CHECK(std::abs(val - expect) < 1e-12);
  }
  for (const auto& [cell, val] : gfull) {
    double expect = gsub.count(cell) ? gsub[cell] : 0.0;
    if (cell == std::make_pair(1, 1)) expect += gs[0];
    if (cell == std::make_pair(1, 2)) expect += gs[1];
    if (cell == std::make_pair(2, 1)) expect += gs[2];
    CHECK(std::abs(val - expect) < 1e-12);
  }
  CHECK_THROWS_AS(vstar(alpha, st, 2, 2), std::invalid_argument);
}

TEST_CASE("one-cell array diffusion is stationary at the log-gamma law") {
  const std::vector<double> alpha = {0.8};
  std::vector<double> u;
  double max_tamed = 0.0;
  for (int r = 0; r < 400; ++r) {
    const auto sim = x_array_simulate(alpha, XArrayState(1), 40.0, 2e-3,
                                      XDirection::forward, 314,
                                      static_cast<std::uint64_t>(r));
    REQUIRE(!sim.blew_up);
    CHECK(sim.elapsed == doctest::Approx(40.0).epsilon(1e-9));
    max_tamed = std::max(max_tamed, sim.tamed_fraction);
    u.push_back(std::exp(-sim.state.at(1, 1)));
  }
  // e^{-X} should be Gamma(2 alpha) distributed.
  const auto ks = ks_one_sample(u, [](double x) { return gamma_p(1.6, x); });
  CHECK(ks.p_value > 1e-3);
  CHECK(max_tamed < 0.01);
}

TEST_CASE("array simulation is deterministic per replica") {
  const std::vector<double> alpha = {0.7, 1.3};
  const auto a =
      x_array_simulate(alpha, XArrayState(2), 1.0, 1e-3, XDirection::reversed, 9, 4);
  const auto b =
      x_array_simulate(alpha, XArrayState(2), 1.0, 1e-3, XDirection::reversed, 9, 4);
  const auto c =
      x_array_simulate(alpha, XArrayState(2), 1.0, 1e-3, XDirection::reversed, 9, 5);
  CHECK(a.state.x == b.state.x);
  CHECK(a.state.x != c.state.x);
}
