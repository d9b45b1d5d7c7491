// Closed algebra of terms c * z^k * e^(a z) * K(s z + d) with K either the
// standard normal density phi, the upper tail Q, or absent. The class is
// closed under differentiation, the smoothing operators
//   D^a f = f' - a f
//   J^b f(z) = int_z^inf e^(b(z-w)) f(w) dw
//   L^b f(z) = int_-inf^z e^(-b(z-w)) f(w) dw
// and argument reflection/shift, which is exactly what is needed to build the
// determinantal transition densities of ordered reflecting diffusions from
// the killed heat kernel. Tail factors are evaluated through the scaled
// complementary error function, so values stay finite for all real arguments.
#pragma once

#include <span>
#include <string>
#include <vector>

namespace flatlpp {

enum class GeKind { plain, gauss, tail };

struct GeTerm {
  double coeff = 0.0;
  int power = 0;       // z^power, power >= 0
  double rate = 0.0;   // e^(rate * z)
  GeKind kind = GeKind::plain;
  double scale = 0.0;  // argument of phi/Q is scale*z + shift
  double shift = 0.0;
};

class GaussErfcFun {
 public:
  GaussErfcFun() = default;
  explicit GaussErfcFun(std::vector<GeTerm> terms);

  static GaussErfcFun zero();
  // Heat kernel phi_t(z) = exp(-z^2/(2t)) / sqrt(2 pi t).
  static GaussErfcFun heat_kernel(double t);

  const std::vector<GeTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double operator()(double z) const;

  GaussErfcFun operator+(const GaussErfcFun& o) const;
  GaussErfcFun operator-(const GaussErfcFun& o) const;
  GaussErfcFun scaled(double c) const;
  GaussErfcFun times_exp(double c) const;   // multiply by e^(c z)
  GaussErfcFun reflect() const;             // z -> -z
  GaussErfcFun shift_arg(double s) const;   // g(z) = f(z - s)
  GaussErfcFun derivative() const;

  std::string str() const;

 private:
  void canonicalize();
  std::vector<GeTerm> terms_;
};

GaussErfcFun ge_apply_D(const GaussErfcFun& f, double alpha);
GaussErfcFun ge_apply_D(const GaussErfcFun& f, std::span<const double> alphas);
// J^b; throws std::domain_error when a plain/lower-tail term makes the
// integral divergent.
GaussErfcFun ge_apply_J(const GaussErfcFun& f, double beta);
GaussErfcFun ge_apply_J(const GaussErfcFun& f, std::span<const double> betas);
GaussErfcFun ge_apply_L(const GaussErfcFun& f, double beta);
GaussErfcFun ge_apply_L(const GaussErfcFun& f, std::span<const double> betas);

// int_z^inf f(w) dw as a member of the class (equals J^0 f).
GaussErfcFun ge_tail_integral(const GaussErfcFun& f);
// Numeric definite integrals.
double ge_integrate_from(const GaussErfcFun& f, double lo);
double ge_integrate_all(const GaussErfcFun& f);

// Killed heat kernel psi_t(x, y) = phi_t(y-x) - phi_t(y+x) as a function of y.
GaussErfcFun ge_killed_kernel(double t, double x);

// Kernel entry D_y^{d_rates} J_x^{j_rates} psi_t(x, y) as a function of y;
// the J chain acts in the first argument, the D chain in the second.
GaussErfcFun ge_kernel_entry(double t, double x, std::span<const double> j_rates,
                             std::span<const double> d_rates);

// Transition density of reflected Brownian motion with drift -alpha on
// [0, inf), from x, as a function of y (time t), including the exponential
// drift prefactor.
GaussErfcFun ge_reflected_density(double t, double alpha, double x);

}  // namespace flatlpp
