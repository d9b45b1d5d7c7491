// Closed-form densities, transition kernels and distribution functions for
// the ordered reflecting systems and their last-passage counterparts:
// invariant densities pi / pi_bar, the determinantal transition density r_t,
// the m-step LPP kernels Q_m, top-particle CDFs (Wronskian and Toda forms),
// the exponential-determinant eigenvalue density, and exact checks of the
// Andreief / integration-by-parts determinant identities.
#pragma once

#include <span>
#include <vector>

#include "flatlpp/expfun.hpp"
#include "flatlpp/gauss_erfc.hpp"

namespace flatlpp {

enum class DriftRegime { equal, distinct, general };

// Drift parameters (alpha_1, ..., alpha_n), all strictly positive. The
// distinct regime additionally requires pairwise gaps above 1e-9.
struct DriftSpec {
  DriftSpec(std::vector<double> rates_in, DriftRegime regime_in);
  static DriftSpec equal(int n, double alpha = 1.0);
  static DriftSpec distinct(std::vector<double> rates_in);

  int n() const { return static_cast<int>(rates.size()); }
  bool all_equal() const;

  std::vector<double> rates;
  DriftRegime regime = DriftRegime::general;
};

// Point of the closed chamber with a wall: 0 <= x_1 <= ... <= x_n.
struct OrderedVector {
  explicit OrderedVector(std::vector<double> values_in);
  int n() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

  std::vector<double> values;
};

// Wall functions: f_0 = 2 e^{-2x} and (1/2) f_{i+1}'' + f_{i+1}' = f_i with
// f_{i+1}(0) = f_{i+1}'(0) = 0. Memoized, returned by reference.
const ExpPoly& build_f_equal(int i);

// Equal-drift invariant density det(f_{i-1}^{(j-1)}(x_j)).
double eval_pi_bar(int n, const OrderedVector& x);
// Distinct-drift invariant density with f_i = e^{a_i x} - e^{-a_i x}; the
// Vandermonde constant is oriented so the density is positive.
double eval_pi_distinct(const DriftSpec& drifts, const OrderedVector& x);
// Exact symbolic mass of the densities over the chamber (should equal 1).
double pi_bar_mass(int n);
double pi_distinct_mass(const DriftSpec& drifts);

// Transition density r_t of the ordered reflecting system, with the matrix
// of kernel entries precomputed once per (drifts, t).
class RtKernel {
 public:
  RtKernel(DriftSpec drifts, double t);

  int n() const { return drifts_.n(); }
  double t() const { return t_; }
  // Matrix entry (0-based): D-chain in y of length j+1, J-chain in x of
  // length i+1, applied to the killed heat kernel.
  double entry(int i, int j, double x, double y) const;
  double operator()(const OrderedVector& x, const OrderedVector& y) const;

 private:
  DriftSpec drifts_;
  double t_;
  double log_pref_;  // -(sum alpha_k^2) t / 2
  std::vector<std::vector<GaussErfcFun>> trans_;  // acts on y - x
  std::vector<std::vector<GaussErfcFun>> refl_;   // acts on y + x
};

double eval_r_t(const DriftSpec& drifts, double t, const OrderedVector& x,
                const OrderedVector& y);

// m-step transition density of the pushing particle chain with per-particle
// rates beta_j, as a determinant over one-sided exponential polynomials.
double eval_Q_m(std::span<const double> beta, int m, const OrderedVector& x,
                const OrderedVector& y);
// Equal-rate (per-cell rate 2) form det(g_m^{(j-i)}(y_j - x_i)).
double eval_Q_m_equal(int n, int m, const OrderedVector& x, const OrderedVector& y);
// Explicit product form of the 1-step density.
double eval_onestep_product(std::span<const double> beta, const OrderedVector& x,
                            const OrderedVector& y);

// CDF of the top particle in its invariant law (equal or distinct drifts).
double eval_cdf_top(const DriftSpec& drifts, double x);
// Tau-function form of the same CDF at equal drifts 1.
double eval_cdf_toda(int n, double x);
// g[n](x) = det((x d/dx)^{i+j-2} sqrt(2/pi) sinh x) in the exp-poly class.
const ExpPoly& toda_g(int n);
// Unnormalized CDF e^{-nx} x^{-n(n-1)/2} g[n](x), evaluated through the
// column-reduced determinant (stable for large x).
double toda_raw(int n, double x);
// Exact normalization constant Z = (2 pi)^{-n/2} prod_{i<n} i!.
double toda_normalization(int n);

// Eigenvalue density prod a_i prod_{i<j}(a_i+a_j) / prod_{i<j}(a_i-a_j)
// times det(e^{-a_i l_j}), and its exact mass over the chamber.
double eval_exp_det_density(const DriftSpec& drifts, const OrderedVector& lambda);
double exp_det_mass(const DriftSpec& drifts);

// Determinant identities; each returns the absolute discrepancy between the
// ordered-region integral of a product of determinants (computed by exact
// nested symbolic integration) and the single determinant of pair integrals.
double andreief_check(std::span<const ExpPoly> f, std::span<const ExpPoly> g);
// Variant with j-th column derivatives against iterated tail integrals.
double ibp_inhomogeneous_check(std::span<const ExpPoly> f, std::span<const ExpPoly> g);
// Variant with D/J chains; requires f_i(0) = 0.
double ibp_chain_check(std::span<const ExpPoly> f, std::span<const ExpPoly> g,
                       std::span<const double> alphas);

}  // namespace flatlpp
