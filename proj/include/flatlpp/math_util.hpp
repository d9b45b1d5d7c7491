// Scalar special functions and adaptive quadrature shared across modules.
#pragma once

#include <functional>

namespace flatlpp {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

// Standard normal density and tails.
double norm_pdf(double x);
double norm_cdf(double x);       // lower tail
double norm_tail(double x);      // upper tail Q(x) = 1 - Phi(x)
double log_norm_tail(double x);  // log Q(x), stable for large x

// Scaled complementary error function exp(x^2) * erfc(x), stable for x >= 0
// and moderate negative x.
double erfcx(double x);

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi2_tail(double stat, double df);

// Kolmogorov distribution tail Q_KS(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 l^2).
double kolmogorov_q(double lambda);

// CDF of the inverse-gamma law with density w^(-shape-1) e^(-1/w)/Gamma(shape).
double inverse_gamma_cdf(double shape, double x);

// Adaptive Simpson quadrature on [a, b] to absolute tolerance tol.
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     double tol, int max_depth = 48);

// Integral over [a, infinity) via exp substitution, absolute tolerance tol.
double adaptive_quad_to_inf(const std::function<double(double)>& f, double a,
                            double tol);

// log(exp(a) + exp(b)) without overflow; tolerates -inf arguments.
double log_sum_exp(double a, double b);

}  // namespace flatlpp
