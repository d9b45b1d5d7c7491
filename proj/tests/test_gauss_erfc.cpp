#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatlpp/gauss_erfc.hpp"
#include "flatlpp/math_util.hpp"

using namespace flatlpp;

TEST_CASE("heat kernel has unit mass and matches the normal density") {
  for (double t : {0.3, 1.0, 4.0}) {
    const GaussErfcFun k = GaussErfcFun::heat_kernel(t);
    CHECK(ge_integrate_all(k) == doctest::Approx(1.0).epsilon(1e-9));
    const double s = std::sqrt(t);
    for (double z : {-1.7, 0.0, 2.4}) {
      CHECK(k(z) == doctest::Approx(norm_pdf(z / s) / s).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(GaussErfcFun::heat_kernel(0.0), std::invalid_argument);
}

TEST_CASE("algebraic operations act pointwise") {
  const GaussErfcFun k = GaussErfcFun::heat_kernel(0.8);
  const double z = 0.9;
  CHECK(k.scaled(3.0)(z) == doctest::Approx(3.0 * k(z)).epsilon(1e-14));
  CHECK(k.times_exp(-0.4)(z) ==
        doctest::Approx(std::exp(-0.4 * z) * k(z)).epsilon(1e-14));
  CHECK(k.reflect()(z) == doctest::Approx(k(-z)).epsilon(1e-14));
  CHECK(k.shift_arg(1.5)(z) == doctest::Approx(k(z - 1.5)).epsilon(1e-14));
  CHECK((k - k).empty());
}

TEST_CASE("derivative and D operator match finite differences") {
  const GaussErfcFun f =
      GaussErfcFun::heat_kernel(1.3).times_exp(0.5).shift_arg(-0.2);
  const GaussErfcFun d = f.derivative();
  const GaussErfcFun df = ge_apply_D(f, 0.7);
  for (double z : {-1.1, 0.4, 2.0}) {
    const double fd = (f(z + 5e-6) - f(z - 5e-6)) / 1e-5;
    CHECK(d(z) == doctest::Approx(fd).epsilon(1e-6));
    CHECK(df(z) == doctest::Approx(fd - 0.7 * f(z)).epsilon(1e-6));
  }
}

TEST_CASE("J and L operators match quadrature") {
  const GaussErfcFun f = GaussErfcFun::heat_kernel(0.9);
  const double b = -0.3, z0 = 0.4;
  const GaussErfcFun jf = ge_apply_J(f, b);
  const double jref = adaptive_quad_to_inf(
      [&](double w) { return std::exp(b * (z0 - w)) * f(w); }, z0, 1e-11);
  CHECK(jf(z0) == doctest::Approx(jref).epsilon(1e-8));

  const double c = 0.4;
  const GaussErfcFun lf = ge_apply_L(f, c);
  // lower integral via reflection: int_{-inf}^{z} = int_{-z}^{inf} reflected
  const double lref = adaptive_quad_to_inf(
      [&](double w) { return std::exp(-c * (z0 + w)) * f(-w); }, -z0, 1e-11);
  CHECK(lf(z0) == doctest::Approx(lref).epsilon(1e-8));

  // J^b of a plain exponential diverges when the kernel cannot damp it.
  const GaussErfcFun plain(
      {GeTerm{1.0, 0, 0.0, GeKind::plain, 0.0, 0.0}});
  CHECK_THROWS_AS(ge_apply_J(plain, -0.5), std::domain_error);
}

TEST_CASE("tail integral differentiates back to the integrand") {
  const GaussErfcFun f = GaussErfcFun::heat_kernel(1.1).times_exp(-0.6);
  const GaussErfcFun tail = ge_tail_integral(f);
  for (double z : {-0.8, 0.3, 1.9}) {
    const double ref = adaptive_quad_to_inf([&](double w) { return f(w); },
                                            z, 1e-11);
    CHECK(tail(z) == doctest::Approx(ref).epsilon(1e-8));
    CHECK(tail.derivative()(z) == doctest::Approx(-f(z)).epsilon(1e-10));
  }
  CHECK(ge_integrate_from(f, 0.5) ==
        doctest::Approx(tail(0.5)).epsilon(1e-8));
}

TEST_CASE("killed heat kernel is symmetric and vanishes at the wall") {
  const double t = 0.7;
  for (double x : {0.4, 1.3}) {
    const GaussErfcFun psi = ge_killed_kernel(t, x);
    CHECK(std::abs(psi(0.0)) < 1e-14);
    for (double y : {0.2, 0.9, 2.1}) {
      CHECK(psi(y) ==
            doctest::Approx(ge_killed_kernel(t, y)(x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("reflected density: mass, stationarity limit, semigroup") {
  const double alpha = 0.8, x = 0.6;
  for (double t : {0.4, 2.0}) {
    const GaussErfcFun p = ge_reflected_density(t, alpha, x);
    CHECK(ge_integrate_from(p, 0.0) == doctest::Approx(1.0).epsilon(1e-8));
  }
  const GaussErfcFun plong = ge_reflected_density(40.0, alpha, x);
  for (double y : {0.1, 0.7, 2.0}) {
    CHECK(plong(y) == doctest::Approx(2.0 * alpha * std::exp(-2.0 * alpha * y))
                          .epsilon(1e-8));
  }
  // Chapman-Kolmogorov: int p_s(x,z) p_t(z,y) dz = p_{s+t}(x,y).
  const double s = 0.5, t2 = 0.9, y0 = 1.1;
  const GaussErfcFun ps = ge_reflected_density(s, alpha, x);
  const double conv = adaptive_quad_to_inf(
      [&](double z) {
        return ps(z) * ge_reflected_density(t2, alpha, z)(y0);
      },
      0.0, 1e-9);
  CHECK(conv == doctest::Approx(ge_reflected_density(s + t2, alpha, x)(y0))
                    .epsilon(1e-6));
}

TEST_CASE("kernel entries reduce to the killed kernel at empty chains") {
  const double t = 0.6, x = 0.9;
  const std::vector<double> none;
  const GaussErfcFun base = ge_kernel_entry(t, x, none, none);
  const GaussErfcFun psi = ge_killed_kernel(t, x);
  for (double y : {0.3, 1.2, 2.5}) {
    CHECK(base(y) == doctest::Approx(psi(y)).epsilon(1e-12));
  }
  // One D in y equals the y-derivative minus alpha times the kernel.
  const std::vector<double> av = {0.7};
  const GaussErfcFun dker = ge_kernel_entry(t, x, none, av);
  const GaussErfcFun ref = ge_apply_D(psi, av[0]);
  for (double y : {0.3, 1.2}) {
    CHECK(dker(y) == doctest::Approx(ref(y)).epsilon(1e-12));
  }
}
