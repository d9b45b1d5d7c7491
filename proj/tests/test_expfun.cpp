#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "flatlpp/expfun.hpp"
#include "flatlpp/math_util.hpp"

using namespace flatlpp;

namespace {

double sup_on_grid(const ExpPoly& f, const ExpPoly& g, double lo, double hi) {
  double worst = 0.0;
  for (int i = 0; i <= 40; ++i) {
    const double x = lo + (hi - lo) * i / 40.0;
    worst = std::max(worst, std::abs(f(x) - g(x)));
  }
  return worst;
}

}  // namespace

TEST_CASE("term evaluation and arithmetic") {
  const ExpPoly f = ExpPoly::term(2.0, 1, -0.5);
  CHECK(f(1.3) == doctest::Approx(2.0 * 1.3 * std::exp(-0.65)).epsilon(1e-14));
  const ExpPoly g = ExpPoly::term(1.0, 0, 0.7);
  const ExpPoly h = f * g + ExpPoly::constant(3.0);
  const double x = 0.8;
  CHECK(h(x) == doctest::Approx(f(x) * g(x) + 3.0).epsilon(1e-14));
  CHECK((f - f).empty());
  CHECK((f.scaled(2.0) - f - f).empty());
  CHECK_THROWS_AS(ExpPoly::term(1.0, -1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(f + ExpPoly::term(1.0, 0, 0.0, true), std::invalid_argument);
}

TEST_CASE("derivative and antiderivative invert each other") {
  const ExpPoly f =
      ExpPoly::term(1.5, 2, 3.0) + ExpPoly::term(-0.4, 0, -1.2);
  const ExpPoly d = f.derivative();
  for (double x : {-0.7, 0.0, 0.9}) {
    const double fd = (f(x + 5e-6) - f(x - 5e-6)) / 1e-5;
    CHECK(d(x) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(ep_approx_equal(f.antiderivative0().derivative(), f, 1e-12));
  CHECK(f.antiderivative0()(0.0) == doctest::Approx(0.0));
  CHECK(ep_approx_equal(f.derivative(2), f.derivative().derivative(), 1e-12));
}

TEST_CASE("times_x and times_exp") {
  const ExpPoly f = ExpPoly::term(2.0, 1, -0.3);
  CHECK(f.times_x()(1.7) == doctest::Approx(1.7 * f(1.7)).epsilon(1e-14));
  CHECK(f.times_exp(0.9)(1.7) ==
        doctest::Approx(std::exp(0.9 * 1.7) * f(1.7)).epsilon(1e-14));
}

TEST_CASE("D inverts I on one-sided functions and J up to sign") {
  const ExpPoly f1 = ExpPoly::term(1.3, 1, -0.4, true) +
                     ExpPoly::term(-0.7, 0, 0.2, true);
  const double a = 0.9;
  CHECK(sup_on_grid(ep_apply_D(ep_apply_I(f1, a), a), f1, 0.0, 5.0) < 1e-12);

  const ExpPoly f2 = ExpPoly::term(0.8, 2, -0.6) + ExpPoly::term(0.3, 0, 0.1);
  CHECK(sup_on_grid(ep_apply_D(ep_apply_J(f2, a), a), f2.scaled(-1.0), -2.0,
                    4.0) < 1e-12);
}

TEST_CASE("I and J agree with quadrature") {
  const ExpPoly f = ExpPoly::term(1.0, 1, -0.8, true);
  const double a = -0.5, x = 1.9;
  const double iref = adaptive_quad(
      [&](double t) { return std::exp(a * (x - t)) * f(t); }, 0.0, x, 1e-12);
  CHECK(ep_apply_I(f, a)(x) == doctest::Approx(iref).epsilon(1e-10));

  const ExpPoly g = ExpPoly::term(1.0, 0, -0.9);
  const double b = 0.4;
  const double jref = adaptive_quad_to_inf(
      [&](double t) { return std::exp(b * (x - t)) * g(t); }, x, 1e-12);
  CHECK(ep_apply_J(g, b)(x) == doctest::Approx(jref).epsilon(1e-10));
}

TEST_CASE("J rejects one-sided input and non-decaying tails") {
  const ExpPoly one_sided = ExpPoly::term(1.0, 0, -1.0, true);
  CHECK_THROWS_AS(ep_apply_J(one_sided, 0.5), std::invalid_argument);
  const ExpPoly slow = ExpPoly::term(1.0, 0, 0.9);
  CHECK_THROWS_AS(ep_apply_J(slow, 0.5), std::domain_error);
}

TEST_CASE("convolution of unit exponentials") {
  const ExpPoly e1 = ExpPoly::term(1.0, 0, -1.0, true);
  // e^{-x} * e^{-x} = x e^{-x}
  CHECK(ep_approx_equal(ep_convolve(e1, e1), ExpPoly::term(1.0, 1, -1.0, true),
                        1e-13));
  const ExpPoly f = ExpPoly::term(1.0, 0, -2.0, true);
  const ExpPoly c = ep_convolve(e1, f);
  const double x = 1.4;
  const double ref = adaptive_quad(
      [&](double t) { return std::exp(-t) * std::exp(-2.0 * (x - t)); }, 0.0,
      x, 1e-12);
  CHECK(c(x) == doctest::Approx(ref).epsilon(1e-11));
  CHECK_THROWS_AS(ep_convolve(e1, ExpPoly::constant(1.0)),
                  std::invalid_argument);
}

TEST_CASE("definite integrals and tail mass") {
  const ExpPoly f = ExpPoly::term(1.0, 0, -2.0);
  CHECK(ep_integrate(f, 0.0, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(0.5).epsilon(1e-13));
  CHECK(ep_integrate(f, 0.5, 2.0) ==
        doctest::Approx((std::exp(-1.0) - std::exp(-4.0)) / 2.0)
            .epsilon(1e-13));
  CHECK(ep_tail_mass(ExpPoly::term(3.0, 1, -1.5))
        == doctest::Approx(3.0 / (1.5 * 1.5)).epsilon(1e-13));
  CHECK_THROWS_AS(ep_tail_mass(ExpPoly::constant(1.0)), std::domain_error);
}

TEST_CASE("adjoint ODE solve satisfies the equation and boundary values") {
  for (const ExpPoly& f :
       {ExpPoly::term(2.0, 0, -2.0), ExpPoly::term(1.0, 1, -0.7),
        ExpPoly::term(0.5, 0, 0.0)}) {
    const ExpPoly h = ep_solve_adjoint(f);
    CHECK(std::abs(h(0.0)) < 1e-13);
    CHECK(std::abs(h.derivative()(0.0)) < 1e-13);
    const ExpPoly resid =
        h.derivative(2).scaled(0.5) + h.derivative() - f;
    for (double x : {0.3, 1.1, 2.6}) CHECK(std::abs(resid(x)) < 1e-11);
  }
}

TEST_CASE("nested ordered integral of two exponentials") {
  std::vector<ExpPoly> factors = {ExpPoly::term(1.0, 0, -1.0),
                                  ExpPoly::term(1.0, 0, -2.0)};
  const ExpPoly g = ep_nested_ordered(factors);
  for (double X : {0.4, 1.0, 3.0}) {
    const double ref = (1.0 - std::exp(-2.0 * X)) / 2.0 -
                       (1.0 - std::exp(-3.0 * X)) / 3.0;
    CHECK(g(X) == doctest::Approx(ref).epsilon(1e-12));
  }
}
