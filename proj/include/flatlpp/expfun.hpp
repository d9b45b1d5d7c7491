// Exact algebra on exponential polynomials: finite sums of c * x^k * e^(r x),
// optionally truncated to x > 0. Supports the one-sided smoothing operators
//   D^a f = f' - a f
//   I^a f(x) = int_0^x e^(a(x-t)) f(t) dt
//   J^a f(x) = int_x^infty e^(a(x-t)) f(t) dt
// together with convolution on [0, x], definite integration, and the adjoint
// ODE solve (1/2) h'' + h' = f with h(0) = h'(0) = 0.
#pragma once

#include <span>
#include <string>
#include <vector>

namespace flatlpp {

struct ExpPolyTerm {
  double coeff = 0.0;
  int power = 0;     // >= 0
  double rate = 0.0; // exponential rate
};

class ExpPoly {
 public:
  ExpPoly() = default;
  ExpPoly(std::vector<ExpPolyTerm> terms, bool one_sided);

  // Convenience factories.
  static ExpPoly zero(bool one_sided = false);
  static ExpPoly term(double coeff, int power, double rate, bool one_sided = false);
  static ExpPoly constant(double c, bool one_sided = false);

  const std::vector<ExpPolyTerm>& terms() const { return terms_; }
  bool one_sided() const { return one_sided_; }
  bool empty() const { return terms_.empty(); }
  int max_power() const;
  double max_rate() const;
  double max_abs_coeff() const;

  double operator()(double x) const;

  ExpPoly operator+(const ExpPoly& o) const;
  ExpPoly operator-(const ExpPoly& o) const;
  ExpPoly operator*(const ExpPoly& o) const;
  ExpPoly scaled(double c) const;
  ExpPoly times_x() const;            // multiply by x
  ExpPoly times_exp(double c) const;  // multiply by e^(c x)

  // Derivative of the smooth part; a one-sided function stays one-sided with
  // no boundary delta.
  ExpPoly derivative() const;
  ExpPoly derivative(int order) const;

  // Antiderivative F(x) = int_0^x f(t) dt (for one-sided input, exact for all x).
  ExpPoly antiderivative0() const;

  std::string str() const;

 private:
  void canonicalize();

  std::vector<ExpPolyTerm> terms_;
  bool one_sided_ = false;
};

// Operators. Chains apply left to right: ep_apply_D(f, {a1, a2}) = D^a2 D^a1 f.
ExpPoly ep_apply_D(const ExpPoly& f, double alpha);
ExpPoly ep_apply_D(const ExpPoly& f, std::span<const double> alphas);
ExpPoly ep_apply_I(const ExpPoly& f, double alpha);
ExpPoly ep_apply_I(const ExpPoly& f, std::span<const double> alphas);
// J requires a two-sided input and every term rate strictly below alpha.
ExpPoly ep_apply_J(const ExpPoly& f, double alpha);
ExpPoly ep_apply_J(const ExpPoly& f, std::span<const double> alphas);

// Convolution (f * g)(x) = int_0^x f(t) g(x - t) dt of one-sided functions.
ExpPoly ep_convolve(const ExpPoly& f, const ExpPoly& g);

// Definite integral over [a, b]; b may be +infinity (requires decay).
double ep_integrate(const ExpPoly& f, double a, double b);

// Exact integral over [0, infinity); throws std::domain_error if any
// surviving term has rate >= 0.
double ep_tail_mass(const ExpPoly& f);

// Solve (1/2) h'' + h' = f with h(0) = h'(0) = 0 exactly (resonant rates 0
// and -2 raise the polynomial degree).
ExpPoly ep_solve_adjoint(const ExpPoly& f);

// Nested ordered integral: returns g_n where g_0 = 1 and
// g_k(x) = int_0^x u_k(t) g_{k-1}(t) dt, i.e. the integral of
// prod u_k(x_k) over 0 <= x_1 <= ... <= x_n <= X as a function of X.
ExpPoly ep_nested_ordered(std::span<const ExpPoly> factors);

// Max absolute coefficient difference between canonical forms.
bool ep_approx_equal(const ExpPoly& f, const ExpPoly& g, double tol);

}  // namespace flatlpp
