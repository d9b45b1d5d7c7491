#include "flatlpp/determinantal.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "flatlpp/math_util.hpp"

namespace flatlpp {

namespace {

// LU with partial pivoting; matrices here are tiny (n <= 6).
double det_dense(std::vector<double> a, int n) {
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r) * n + c]) >
          std::abs(a[static_cast<std::size_t>(piv) * n + c]))
        piv = r;
    if (a[static_cast<std::size_t>(piv) * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int k = 0; k < n; ++k)
        std::swap(a[static_cast<std::size_t>(piv) * n + k],
                  a[static_cast<std::size_t>(c) * n + k]);
      det = -det;
    }
    const double d = a[static_cast<std::size_t>(c) * n + c];
    det *= d;
    for (int r = c + 1; r < n; ++r) {
      const double m = a[static_cast<std::size_t>(r) * n + c] / d;
      for (int k = c; k < n; ++k)
        a[static_cast<std::size_t>(r) * n + k] -= m * a[static_cast<std::size_t>(c) * n + k];
    }
  }
  return det;
}

void for_each_perm(int n, const std::function<void(const std::vector<int>&, int)>& fn) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  do {
    int inv = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(j)]) ++inv;
    fn(p, (inv % 2) ? -1 : 1);
  } while (std::next_permutation(p.begin(), p.end()));
}

// Value at +infinity of an exp-poly whose growing pieces should have
// cancelled exactly; stray residuals above a relative tolerance are an error.
double ep_limit_at_inf(const ExpPoly& f) {
  double limit = 0.0;
  double residual = 0.0;
  double scale = 1.0;
  for (const auto& t : f.terms()) scale = std::max(scale, std::abs(t.coeff));
  for (const auto& t : f.terms()) {
    if (t.rate < -1e-12) continue;
    if (t.rate <= 1e-12 && t.power == 0)
      limit += t.coeff;
    else
      residual = std::max(residual, std::abs(t.coeff));
  }
  if (residual > 1e-9 * scale)
    throw std::runtime_error("ep_limit_at_inf: non-decaying terms survive");
  return limit;
}

double vandermonde(std::span<const double> a) {
  double v = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) v *= a[j] - a[i];
  return v;
}

const ExpPoly& f_equal_deriv(int i, int order) {
  static std::deque<std::deque<ExpPoly>> table;  // table[i][k] = f_i^{(k)}
  while (static_cast<int>(table.size()) <= i)
    table.push_back({build_f_equal(static_cast<int>(table.size()))});
  auto& row = table[static_cast<std::size_t>(i)];
  while (static_cast<int>(row.size()) <= order) row.push_back(row.back().derivative());
  return row[static_cast<std::size_t>(order)];
}

ExpPoly odd_exp(double alpha) {
  return ExpPoly::term(1.0, 0, alpha) - ExpPoly::term(1.0, 0, -alpha);
}

// Column chains D^{a_1..a_j} f_i; column 0 holds f_i itself.
std::vector<std::vector<ExpPoly>> d_chain_table(std::span<const double> rates,
                                                const std::vector<ExpPoly>& f, int cols) {
  std::vector<std::vector<ExpPoly>> ch(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    ch[i].reserve(static_cast<std::size_t>(cols));
    ch[i].push_back(f[i]);
    for (int j = 1; j < cols; ++j)
      ch[i].push_back(ep_apply_D(ch[i].back(), rates[static_cast<std::size_t>(j) - 1]));
  }
  return ch;
}

void require_distinct(std::span<const double> rates) {
  for (std::size_t i = 0; i < rates.size(); ++i)
    for (std::size_t j = i + 1; j < rates.size(); ++j)
      if (std::abs(rates[i] - rates[j]) <= 1e-9)
        throw std::invalid_argument("drift rates too close for the distinct-drift formulas");
}

}  // namespace

DriftSpec::DriftSpec(std::vector<double> rates_in, DriftRegime regime_in)
    : rates(std::move(rates_in)), regime(regime_in) {
  if (rates.empty()) throw std::invalid_argument("DriftSpec: empty rate vector");
  for (double a : rates)
    if (!(a > 0.0)) throw std::invalid_argument("DriftSpec: rates must be positive");
  if (regime == DriftRegime::equal) {
    for (double a : rates)
      if (a != rates.front())
        throw std::invalid_argument("DriftSpec: equal regime with unequal rates");
  }
  if (regime == DriftRegime::distinct) require_distinct(rates);
}

DriftSpec DriftSpec::equal(int n, double alpha) {
  return DriftSpec(std::vector<double>(static_cast<std::size_t>(n), alpha),
                   DriftRegime::equal);
}

DriftSpec DriftSpec::distinct(std::vector<double> rates_in) {
  return DriftSpec(std::move(rates_in), DriftRegime::distinct);
}

bool DriftSpec::all_equal() const {
  for (double a : rates)
    if (a != rates.front()) return false;
  return true;
}

OrderedVector::OrderedVector(std::vector<double> values_in) : values(std::move(values_in)) {
  if (values.empty()) throw std::invalid_argument("OrderedVector: empty");
  double prev = 0.0;
  for (double v : values) {
    if (v < prev - 1e-12) throw std::invalid_argument("OrderedVector: outside chamber");
    prev = v;
  }
}

const ExpPoly& build_f_equal(int i) {
  // deque: references handed out stay valid as the memo grows
  static std::deque<ExpPoly> memo{ExpPoly::term(2.0, 0, -2.0)};
  while (static_cast<int>(memo.size()) <= i) memo.push_back(ep_solve_adjoint(memo.back()));
  return memo[static_cast<std::size_t>(i)];
}

double eval_pi_bar(int n, const OrderedVector& x) {
  if (x.n() != n) throw std::invalid_argument("eval_pi_bar: dimension mismatch");
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] = f_equal_deriv(i, j)(x[j]);
  return det_dense(std::move(m), n);
}

double eval_pi_distinct(const DriftSpec& drifts, const OrderedVector& x) {
  const int n = drifts.n();
  if (x.n() != n) throw std::invalid_argument("eval_pi_distinct: dimension mismatch");
  require_distinct(drifts.rates);
  std::vector<ExpPoly> f;
  f.reserve(static_cast<std::size_t>(n));
  for (double a : drifts.rates) f.push_back(odd_exp(a));
  // Column j (1-based) carries the chain D^{a_1..a_j}.
  auto ch = d_chain_table(drifts.rates, f, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ep_apply_D(
          ch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
          drifts.rates[static_cast<std::size_t>(j)]);
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  double log_pref = 0.0;
  for (int i = 0; i < n; ++i) {
    log_pref -= drifts.rates[static_cast<std::size_t>(i)] * x[i];
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] =
          ch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](x[j]);
  }
  return std::exp(log_pref) * det_dense(std::move(m), n) / vandermonde(drifts.rates);
}

double pi_bar_mass(int n) {
  ExpPoly total = ExpPoly::zero();
  for_each_perm(n, [&](const std::vector<int>& p, int sign) {
    std::vector<ExpPoly> factors;
    factors.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) factors.push_back(f_equal_deriv(p[static_cast<std::size_t>(k)], k));
    total = total + ep_nested_ordered(factors).scaled(sign);
  });
  return ep_limit_at_inf(total);
}

double pi_distinct_mass(const DriftSpec& drifts) {
  const int n = drifts.n();
  require_distinct(drifts.rates);
  std::vector<ExpPoly> f;
  f.reserve(static_cast<std::size_t>(n));
  for (double a : drifts.rates) f.push_back(odd_exp(a));
  auto ch = d_chain_table(drifts.rates, f, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      ch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ep_apply_D(
          ch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
          drifts.rates[static_cast<std::size_t>(j)]);
  ExpPoly total = ExpPoly::zero();
  for_each_perm(n, [&](const std::vector<int>& p, int sign) {
    std::vector<ExpPoly> factors;
    factors.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      factors.push_back(ch[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])]
                          [static_cast<std::size_t>(k)]
                              .times_exp(-drifts.rates[static_cast<std::size_t>(k)]));
    total = total + ep_nested_ordered(factors).scaled(sign);
  });
  return ep_limit_at_inf(total) / vandermonde(drifts.rates);
}

RtKernel::RtKernel(DriftSpec drifts, double t) : drifts_(std::move(drifts)), t_(t) {
  if (!(t > 0.0)) throw std::invalid_argument("RtKernel: t must be positive");
  const int n = drifts_.n();
  const auto phi = GaussErfcFun::heat_kernel(t);
  log_pref_ = 0.0;
  for (double a : drifts_.rates) log_pref_ -= 0.5 * a * a * t;
  trans_.resize(static_cast<std::size_t>(n));
  refl_.resize(static_cast<std::size_t>(n));
  std::vector<double> neg;  // -a_1, ..., -a_i
  for (int i = 0; i < n; ++i) {
    neg.push_back(-drifts_.rates[static_cast<std::size_t>(i)]);
    GaussErfcFun a = ge_apply_L(phi, neg);
    GaussErfcFun b = ge_apply_J(phi, neg);
    auto& trow = trans_[static_cast<std::size_t>(i)];
    auto& rrow = refl_[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      a = ge_apply_D(a, drifts_.rates[static_cast<std::size_t>(j)]);
      b = ge_apply_D(b, drifts_.rates[static_cast<std::size_t>(j)]);
      trow.push_back(a);
      rrow.push_back(b);
    }
  }
}

double RtKernel::entry(int i, int j, double x, double y) const {
  return trans_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](y - x) -
         refl_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](y + x);
}

double RtKernel::operator()(const OrderedVector& x, const OrderedVector& y) const {
  const int n = drifts_.n();
  if (x.n() != n || y.n() != n) throw std::invalid_argument("RtKernel: dimension mismatch");
  double log_pref = log_pref_;
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    log_pref -= drifts_.rates[static_cast<std::size_t>(i)] * (y[i] - x[i]);
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] = entry(i, j, x[i], y[j]);
  }
  return std::exp(log_pref) * det_dense(std::move(m), n);
}

double eval_r_t(const DriftSpec& drifts, double t, const OrderedVector& x,
                const OrderedVector& y) {
  return RtKernel(drifts, t)(x, y);
}

double eval_Q_m(std::span<const double> beta, int m, const OrderedVector& x,
                const OrderedVector& y) {
  const int n = static_cast<int>(beta.size());
  if (x.n() != n || y.n() != n) throw std::invalid_argument("eval_Q_m: dimension mismatch");
  if (m < 1) throw std::invalid_argument("eval_Q_m: m must be >= 1");
  for (double b : beta)
    if (!(b > 0.0)) throw std::invalid_argument("eval_Q_m: rates must be positive");
  const ExpPoly fm = ExpPoly::term(1.0 / std::tgamma(m), m - 1, 0.0, true);
  double log_pref = 0.0;
  std::vector<double> mat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    log_pref += m * std::log(beta[static_cast<std::size_t>(i)]) -
                beta[static_cast<std::size_t>(i)] * (y[i] - x[i]);
    for (int j = 0; j < n; ++j) {
      ExpPoly e = fm;
      if (j > i) e = ep_apply_D(e, beta.subspan(static_cast<std::size_t>(i) + 1,
                                                static_cast<std::size_t>(j - i)));
      if (j < i) e = ep_apply_I(e, beta.subspan(static_cast<std::size_t>(j) + 1,
                                                static_cast<std::size_t>(i - j)));
      mat[static_cast<std::size_t>(i) * n + j] = e(y[j] - x[i]);
    }
  }
  return std::exp(log_pref) * det_dense(std::move(mat), n);
}

double eval_Q_m_equal(int n, int m, const OrderedVector& x, const OrderedVector& y) {
  if (x.n() != n || y.n() != n)
    throw std::invalid_argument("eval_Q_m_equal: dimension mismatch");
  if (m < 1) throw std::invalid_argument("eval_Q_m_equal: m must be >= 1");
  const ExpPoly gm =
      ExpPoly::term(std::pow(2.0, m) / std::tgamma(m), m - 1, -2.0, true);
  // orders[k + n - 1] = g_m^{(k)} for k in [-(n-1), n-1]
  std::vector<ExpPoly> orders(static_cast<std::size_t>(2 * n - 1), gm);
  for (int k = 1; k < n; ++k) {
    orders[static_cast<std::size_t>(n - 1 + k)] =
        orders[static_cast<std::size_t>(n - 2 + k)].derivative();
    orders[static_cast<std::size_t>(n - 1 - k)] =
        orders[static_cast<std::size_t>(n - k)].antiderivative0();
  }
  std::vector<double> mat(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mat[static_cast<std::size_t>(i) * n + j] =
          orders[static_cast<std::size_t>(n - 1 + j - i)](y[j] - x[i]);
  return det_dense(std::move(mat), n);
}

double eval_onestep_product(std::span<const double> beta, const OrderedVector& x,
                            const OrderedVector& y) {
  const int n = static_cast<int>(beta.size());
  if (x.n() != n || y.n() != n)
    throw std::invalid_argument("eval_onestep_product: dimension mismatch");
  double p = 1.0;
  double prev = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double lo = std::max(x[j], prev);
    if (y[j] < lo) return 0.0;
    p *= beta[static_cast<std::size_t>(j)] *
         std::exp(-beta[static_cast<std::size_t>(j)] * (y[j] - lo));
    prev = y[j];
  }
  return p;
}

namespace {

double cdf_top_equal_unit(int n, double x) {
  if (x <= 0.0) return 0.0;
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    m[static_cast<std::size_t>(i) * n] = build_f_equal(i).antiderivative0()(x);
    for (int j = 1; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] = f_equal_deriv(i, j - 1)(x);
  }
  return det_dense(std::move(m), n);
}

}  // namespace

double eval_cdf_top(const DriftSpec& drifts, double x) {
  const int n = drifts.n();
  if (x <= 0.0) return 0.0;
  if (drifts.all_equal()) return cdf_top_equal_unit(n, drifts.rates.front() * x);
  require_distinct(drifts.rates);
  std::vector<ExpPoly> f;
  f.reserve(static_cast<std::size_t>(n));
  for (double a : drifts.rates) f.push_back(odd_exp(a));
  // Column j (1-based) carries the chain D^{a_1..a_{j-1}}; all entries are
  // evaluated at the same point.
  const auto ch = d_chain_table(drifts.rates, f, n);
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  double asum = 0.0;
  for (int i = 0; i < n; ++i) {
    asum += drifts.rates[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] =
          ch[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)](x);
  }
  return std::exp(-asum * x) * det_dense(std::move(m), n) / vandermonde(drifts.rates);
}

const ExpPoly& toda_g(int n) {
  static std::vector<ExpPoly> memo{ExpPoly::constant(1.0)};
  static std::vector<ExpPoly> thetas;  // thetas[k] = (x d/dx)^k sqrt(2/pi) sinh x
  if (thetas.empty()) {
    const double c = std::sqrt(2.0 / kPi) / 2.0;
    thetas.push_back(ExpPoly::term(c, 0, 1.0) - ExpPoly::term(c, 0, -1.0));
  }
  while (static_cast<int>(memo.size()) <= n) {
    const int k = static_cast<int>(memo.size());
    while (static_cast<int>(thetas.size()) < 2 * k - 1)
      thetas.push_back(thetas.back().derivative().times_x());
    ExpPoly g = ExpPoly::zero();
    for_each_perm(k, [&](const std::vector<int>& p, int sign) {
      ExpPoly prod = thetas[static_cast<std::size_t>(p[0])];
      for (int j = 1; j < k; ++j)
        prod = prod * thetas[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] + j)];
      g = g + prod.scaled(sign);
    });
    memo.push_back(g);
  }
  return memo[static_cast<std::size_t>(n)];
}

namespace {

struct PolyPair {
  std::vector<double> p, q;  // h e^{-x} = c (p(x) + q(x) e^{-2x})
};

std::vector<double> poly_derivative(const std::vector<double>& a) {
  std::vector<double> d;
  for (std::size_t k = 1; k < a.size(); ++k) d.push_back(static_cast<double>(k) * a[k]);
  return d;
}

std::vector<double> poly_shift_x(const std::vector<double>& a) {
  std::vector<double> r(a.size() + 1, 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) r[k + 1] = a[k];
  return r;
}

std::vector<double> poly_axpy(const std::vector<double>& a, double c,
                              const std::vector<double>& b) {
  std::vector<double> r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t k = 0; k < a.size(); ++k) r[k] += a[k];
  for (std::size_t k = 0; k < b.size(); ++k) r[k] += c * b[k];
  return r;
}

double poly_eval(const std::vector<double>& a, double x) {
  double v = 0.0;
  for (std::size_t k = a.size(); k-- > 0;) v = v * x + a[k];
  return v;
}

// Rows of the reduced Toda determinant: (theta^{i} s) e^{-x} = c (P_i + Q_i e^{-2x})
// with P_{i+1} = x (P_i' + P_i) and Q_{i+1} = x (Q_i' - Q_i).
const PolyPair& theta_poly(int i) {
  static std::vector<PolyPair> memo{{{1.0}, {-1.0}}};
  while (static_cast<int>(memo.size()) <= i) {
    const auto& prev = memo.back();
    PolyPair next;
    next.p = poly_shift_x(poly_axpy(poly_derivative(prev.p), 1.0, prev.p));
    next.q = poly_shift_x(poly_axpy(poly_derivative(prev.q), -1.0, prev.q));
    memo.push_back(std::move(next));
  }
  return memo[static_cast<std::size_t>(i)];
}

}  // namespace

double toda_raw(int n, double x) {
  const double c = std::sqrt(2.0 / kPi) / 2.0;
  const double e2 = std::exp(-2.0 * x);
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    // Successive derivatives of c (P_i + Q_i e^{-2x}).
    std::vector<double> p = theta_poly(i).p;
    std::vector<double> q = theta_poly(i).q;
    for (int j = 0; j < n; ++j) {
      if (j > 0) {
        auto qd = poly_derivative(q);
        q = poly_axpy(qd, -2.0, q);
        p = poly_derivative(p);
      }
      m[static_cast<std::size_t>(i) * n + j] = c * (poly_eval(p, x) + poly_eval(q, x) * e2);
    }
  }
  return det_dense(std::move(m), n);
}

double toda_normalization(int n) {
  double fact = 1.0;
  double prod = 1.0;  // prod_{i=1}^{n} (i-1)!
  for (int i = 1; i <= n; ++i) {
    prod *= fact;
    fact *= i;
  }
  return std::pow(2.0 * kPi, -0.5 * n) * prod;
}

double eval_cdf_toda(int n, double x) {
  if (x <= 0.0) return 0.0;
  return toda_raw(n, x) / toda_normalization(n);
}

double eval_exp_det_density(const DriftSpec& drifts, const OrderedVector& lambda) {
  const int n = drifts.n();
  if (lambda.n() != n)
    throw std::invalid_argument("eval_exp_det_density: dimension mismatch");
  require_distinct(drifts.rates);
  double pref = 1.0;
  for (int i = 0; i < n; ++i) {
    pref *= drifts.rates[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j)
      pref *= (drifts.rates[static_cast<std::size_t>(i)] + drifts.rates[static_cast<std::size_t>(j)]) /
              (drifts.rates[static_cast<std::size_t>(i)] - drifts.rates[static_cast<std::size_t>(j)]);
  }
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] =
          std::exp(-drifts.rates[static_cast<std::size_t>(i)] * lambda[j]);
  return pref * det_dense(std::move(m), n);
}

double exp_det_mass(const DriftSpec& drifts) {
  const int n = drifts.n();
  require_distinct(drifts.rates);
  double pref = 1.0;
  for (int i = 0; i < n; ++i) {
    pref *= drifts.rates[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j)
      pref *= (drifts.rates[static_cast<std::size_t>(i)] + drifts.rates[static_cast<std::size_t>(j)]) /
              (drifts.rates[static_cast<std::size_t>(i)] - drifts.rates[static_cast<std::size_t>(j)]);
  }
  ExpPoly total = ExpPoly::zero();
  for_each_perm(n, [&](const std::vector<int>& p, int sign) {
    std::vector<ExpPoly> factors;
    factors.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
      factors.push_back(ExpPoly::term(
          1.0, 0, -drifts.rates[static_cast<std::size_t>(p[static_cast<std::size_t>(k)])]));
    total = total + ep_nested_ordered(factors).scaled(sign);
  });
  return pref * ep_limit_at_inf(total);
}

namespace {

// Ordered-chamber integral of det(F_k-col factors) det(G_k-row factors) by
// expanding both determinants and integrating each product symbolically.
double det_pair_integral(int n, const std::function<ExpPoly(int who, int var)>& ffac,
                         const std::function<ExpPoly(int who, int var)>& gfac) {
  ExpPoly total = ExpPoly::zero();
  for_each_perm(n, [&](const std::vector<int>& ps, int ss) {
    for_each_perm(n, [&](const std::vector<int>& pt, int st) {
      std::vector<ExpPoly> factors;
      factors.reserve(static_cast<std::size_t>(n));
      for (int k = 0; k < n; ++k)
        factors.push_back(ffac(ps[static_cast<std::size_t>(k)], k) *
                          gfac(pt[static_cast<std::size_t>(k)], k));
      total = total + ep_nested_ordered(factors).scaled(ss * st);
    });
  });
  return ep_limit_at_inf(total);
}

double pair_mass_det(std::span<const ExpPoly> f, std::span<const ExpPoly> g) {
  const int n = static_cast<int>(f.size());
  std::vector<double> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[static_cast<std::size_t>(i) * n + j] =
          ep_tail_mass(f[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)]);
  return det_dense(std::move(m), n);
}

}  // namespace

double andreief_check(std::span<const ExpPoly> f, std::span<const ExpPoly> g) {
  const int n = static_cast<int>(f.size());
  if (static_cast<int>(g.size()) != n)
    throw std::invalid_argument("andreief_check: size mismatch");
  const double lhs = det_pair_integral(
      n, [&](int who, int) { return f[static_cast<std::size_t>(who)]; },
      [&](int who, int) { return g[static_cast<std::size_t>(who)]; });
  return std::abs(lhs - pair_mass_det(f, g));
}

double ibp_inhomogeneous_check(std::span<const ExpPoly> f, std::span<const ExpPoly> g) {
  const int n = static_cast<int>(f.size());
  if (static_cast<int>(g.size()) != n)
    throw std::invalid_argument("ibp_inhomogeneous_check: size mismatch");
  std::vector<std::vector<ExpPoly>> fd(static_cast<std::size_t>(n));
  std::vector<std::vector<ExpPoly>> gj(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    fd[static_cast<std::size_t>(i)].push_back(f[static_cast<std::size_t>(i)]);
    gj[static_cast<std::size_t>(i)].push_back(g[static_cast<std::size_t>(i)]);
    for (int k = 1; k < n; ++k) {
      fd[static_cast<std::size_t>(i)].push_back(fd[static_cast<std::size_t>(i)].back().derivative());
      gj[static_cast<std::size_t>(i)].push_back(
          ep_apply_J(gj[static_cast<std::size_t>(i)].back(), 0.0));
    }
  }
  // g^{(-k)}(x) = int_x^inf (u-x)^{k-1}/(k-1)! g(u) du = (J^0)^k g.
  const double lhs = det_pair_integral(
      n,
      [&](int who, int var) {
        return fd[static_cast<std::size_t>(who)][static_cast<std::size_t>(var)];
      },
      [&](int who, int var) {
        return gj[static_cast<std::size_t>(who)][static_cast<std::size_t>(var)];
      });
  return std::abs(lhs - pair_mass_det(f, g));
}

double ibp_chain_check(std::span<const ExpPoly> f, std::span<const ExpPoly> g,
                       std::span<const double> alphas) {
  const int n = static_cast<int>(f.size());
  if (static_cast<int>(g.size()) != n || static_cast<int>(alphas.size()) < n)
    throw std::invalid_argument("ibp_chain_check: size mismatch");
  for (const auto& fi : f)
    if (std::abs(fi(0.0)) > 1e-12)
      throw std::invalid_argument("ibp_chain_check: requires f_i(0) = 0");
  std::vector<std::vector<ExpPoly>> fc(static_cast<std::size_t>(n));
  std::vector<std::vector<ExpPoly>> gc(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    fc[static_cast<std::size_t>(i)].push_back(f[static_cast<std::size_t>(i)]);
    gc[static_cast<std::size_t>(i)].push_back(g[static_cast<std::size_t>(i)]);
    for (int k = 0; k < n; ++k) {
      fc[static_cast<std::size_t>(i)].push_back(
          ep_apply_D(fc[static_cast<std::size_t>(i)].back(), alphas[static_cast<std::size_t>(k)]));
      gc[static_cast<std::size_t>(i)].push_back(
          ep_apply_J(gc[static_cast<std::size_t>(i)].back(), -alphas[static_cast<std::size_t>(k)]));
    }
  }
  const double lhs = det_pair_integral(
      n,
      [&](int who, int var) {
        return fc[static_cast<std::size_t>(who)][static_cast<std::size_t>(var) + 1];
      },
      [&](int who, int var) {
        return gc[static_cast<std::size_t>(who)][static_cast<std::size_t>(var) + 1];
      });
  return std::abs(lhs - pair_mass_det(f, g));
}

}  // namespace flatlpp
