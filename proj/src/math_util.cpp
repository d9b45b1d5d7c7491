#include "flatlpp/math_util.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatlpp {

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(-x) = 2 exp(x^2) - erfcx(x); only safe while exp(x^2) is finite.
    if (x < -26.0) return std::numeric_limits<double>::infinity();
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x < 5.0) return std::exp(x * x) * std::erfc(x);
  // Laplace continued fraction; converges quickly for x >= 5.
  double cf = 0.0;
  for (int k = 24; k >= 1; --k) cf = 0.5 * k / (x + cf);
  return (1.0 / std::sqrt(kPi)) / (x + cf);
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double norm_tail(double x) {
  if (x < 8.0) return 0.5 * std::erfc(x / kSqrt2);
  return 0.5 * erfcx(x / kSqrt2) * std::exp(-0.5 * x * x);
}

double log_norm_tail(double x) {
  if (x < 8.0) {
    const double q = norm_tail(x);
    return std::log(q);
  }
  return std::log(0.5 * erfcx(x / kSqrt2)) - 0.5 * x * x;
}

namespace {

// Series expansion for P(a,x), x < a + 1.
double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < 500; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), x >= a + 1 (modified Lentz).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_p: a must be > 0");
  if (x < 0.0) throw std::invalid_argument("gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_q: a must be > 0");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_tail(double stat, double df) {
  if (stat <= 0.0) return 1.0;
  return gamma_q(0.5 * df, 0.5 * stat);
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += sign * term;
    if (term < 1e-18) break;
    sign = -sign;
  }
  const double q = 2.0 * sum;
  if (q < 0.0) return 0.0;
  if (q > 1.0) return 1.0;
  return q;
}

double inverse_gamma_cdf(double shape, double x) {
  if (x <= 0.0) return 0.0;
  // P(W <= x) = P(1/Gamma <= x) = P(Gamma >= 1/x) = Q(shape, 1/x)
  return gamma_q(shape, 1.0 / x);
}

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa,
                     double b, double fb, double m, double fm, double whole,
                     double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double tol, int max_depth) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson(a, fa, b, fb, fm);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double adaptive_quad_to_inf(const std::function<double(double)>& f, double a,
                            double tol) {
  // x = a + e^u - 1 maps u in [0, inf); truncate once the integrand is dead.
  // Instead integrate on u in [0, U] with growing U until the tail block is
  // below tol.
  double total = 0.0;
  double lo = a;
  double width = 1.0;
  for (int block = 0; block < 200; ++block) {
    const double hi = lo + width;
    const double piece = adaptive_quad(f, lo, hi, tol * 0.25);
    total += piece;
    if (block > 2 && std::fabs(piece) < 0.5 * tol * (1.0 + std::fabs(total))) {
      break;
    }
    lo = hi;
    width *= 1.6;
  }
  return total;
}

double log_sum_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-(std::fabs(a - b))));
}

}  // namespace flatlpp
