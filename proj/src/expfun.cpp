#include "flatlpp/expfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace flatlpp {

namespace {

constexpr double kRateTol = 1e-12;   // rates closer than this are merged
constexpr double kCoeffDrop = 1e-14; // relative coefficient threshold
constexpr int kMaxPower = 80;

bool rates_equal(double a, double b) { return std::fabs(a - b) < kRateTol; }

// Antiderivative of x^k e^(c x) with c != 0 as a list of terms (indefinite,
// no constant): int x^k e^(cx) dx = e^(cx) sum_{r=0..k} (-1)^r k!/(k-r)! x^(k-r) / c^(r+1)
void antideriv_power_exp(double coeff, int k, double c,
                         std::vector<ExpPolyTerm>& out) {
  double fac = coeff;
  for (int r = 0; r <= k; ++r) {
    out.push_back({fac / std::pow(c, r + 1) * ((r % 2 == 0) ? 1.0 : -1.0), k - r, c});
    fac *= (k - r);
  }
}

}  // namespace

ExpPoly::ExpPoly(std::vector<ExpPolyTerm> terms, bool one_sided)
    : terms_(std::move(terms)), one_sided_(one_sided) {
  canonicalize();
}

ExpPoly ExpPoly::zero(bool one_sided) { return ExpPoly({}, one_sided); }

ExpPoly ExpPoly::term(double coeff, int power, double rate, bool one_sided) {
  if (power < 0) throw std::invalid_argument("ExpPoly: negative power");
  return ExpPoly({{coeff, power, rate}}, one_sided);
}

ExpPoly ExpPoly::constant(double c, bool one_sided) {
  return ExpPoly({{c, 0, 0.0}}, one_sided);
}

void ExpPoly::canonicalize() {
  for (const auto& t : terms_) {
    if (t.power < 0 || t.power > kMaxPower)
      throw std::invalid_argument("ExpPoly: power out of range");
    if (!std::isfinite(t.coeff) || !std::isfinite(t.rate))
      throw std::invalid_argument("ExpPoly: non-finite term");
  }
  std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) {
    if (!rates_equal(a.rate, b.rate)) return a.rate < b.rate;
    return a.power < b.power;
  });
  std::vector<ExpPolyTerm> merged;
  for (const auto& t : terms_) {
    if (!merged.empty() && rates_equal(merged.back().rate, t.rate) &&
        merged.back().power == t.power) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(t);
    }
  }
  double cmax = 0.0;
  for (const auto& t : merged) cmax = std::max(cmax, std::fabs(t.coeff));
  terms_.clear();
  for (const auto& t : merged) {
    if (std::fabs(t.coeff) > kCoeffDrop * cmax) terms_.push_back(t);
  }
}

int ExpPoly::max_power() const {
  int p = 0;
  for (const auto& t : terms_) p = std::max(p, t.power);
  return p;
}

double ExpPoly::max_rate() const {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms_) r = std::max(r, t.rate);
  return r;
}

double ExpPoly::max_abs_coeff() const {
  double c = 0.0;
  for (const auto& t : terms_) c = std::max(c, std::fabs(t.coeff));
  return c;
}

double ExpPoly::operator()(double x) const {
  if (one_sided_ && x <= 0.0) return 0.0;
  double sum = 0.0;
  for (const auto& t : terms_) {
    sum += t.coeff * std::pow(x, t.power) * std::exp(t.rate * x);
  }
  return sum;
}

ExpPoly ExpPoly::operator+(const ExpPoly& o) const {
  if (one_sided_ != o.one_sided_ && !terms_.empty() && !o.terms_.empty())
    throw std::invalid_argument("ExpPoly: mixing one-sided and two-sided");
  std::vector<ExpPolyTerm> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return ExpPoly(std::move(t), terms_.empty() ? o.one_sided_ : one_sided_);
}

ExpPoly ExpPoly::operator-(const ExpPoly& o) const { return *this + o.scaled(-1.0); }

ExpPoly ExpPoly::operator*(const ExpPoly& o) const {
  std::vector<ExpPolyTerm> t;
  t.reserve(terms_.size() * o.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : o.terms_)
      t.push_back({a.coeff * b.coeff, a.power + b.power, a.rate + b.rate});
  return ExpPoly(std::move(t), one_sided_ || o.one_sided_);
}

ExpPoly ExpPoly::scaled(double c) const {
  std::vector<ExpPolyTerm> t = terms_;
  for (auto& x : t) x.coeff *= c;
  return ExpPoly(std::move(t), one_sided_);
}

ExpPoly ExpPoly::times_x() const {
  std::vector<ExpPolyTerm> t = terms_;
  for (auto& x : t) ++x.power;
  return ExpPoly(std::move(t), one_sided_);
}

ExpPoly ExpPoly::times_exp(double c) const {
  std::vector<ExpPolyTerm> t = terms_;
  for (auto& x : t) x.rate += c;
  return ExpPoly(std::move(t), one_sided_);
}

ExpPoly ExpPoly::derivative() const {
  std::vector<ExpPolyTerm> t;
  t.reserve(2 * terms_.size());
  for (const auto& a : terms_) {
    if (a.power > 0) t.push_back({a.coeff * a.power, a.power - 1, a.rate});
    if (a.rate != 0.0) t.push_back({a.coeff * a.rate, a.power, a.rate});
  }
  return ExpPoly(std::move(t), one_sided_);
}

ExpPoly ExpPoly::derivative(int order) const {
  ExpPoly f = *this;
  for (int i = 0; i < order; ++i) f = f.derivative();
  return f;
}

ExpPoly ExpPoly::antiderivative0() const {
  std::vector<ExpPolyTerm> t;
  double at_zero = 0.0;
  for (const auto& a : terms_) {
    if (a.rate == 0.0 || rates_equal(a.rate, 0.0)) {
      t.push_back({a.coeff / (a.power + 1), a.power + 1, 0.0});
    } else {
      std::vector<ExpPolyTerm> part;
      antideriv_power_exp(a.coeff, a.power, a.rate, part);
      for (const auto& p : part) {
        t.push_back(p);
        if (p.power == 0) at_zero += p.coeff;  // value of the primitive at 0
      }
    }
  }
  t.push_back({-at_zero, 0, 0.0});
  return ExpPoly(std::move(t), one_sided_);
}

std::string ExpPoly::str() const {
  std::ostringstream os;
  if (terms_.empty()) return "0";
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << t.coeff;
    if (t.power > 0) os << "*x^" << t.power;
    if (t.rate != 0.0) os << "*e^(" << t.rate << "x)";
  }
  if (one_sided_) os << " [x>0]";
  return os.str();
}

ExpPoly ep_apply_D(const ExpPoly& f, double alpha) {
  return f.derivative() - f.scaled(alpha);
}

ExpPoly ep_apply_D(const ExpPoly& f, std::span<const double> alphas) {
  ExpPoly g = f;
  for (double a : alphas) g = ep_apply_D(g, a);
  return g;
}

ExpPoly ep_apply_I(const ExpPoly& f, double alpha) {
  // I^a f(x) = e^(a x) int_0^x e^(-a t) f(t) dt
  const ExpPoly shifted = f.times_exp(-alpha);
  return shifted.antiderivative0().times_exp(alpha);
}

ExpPoly ep_apply_I(const ExpPoly& f, std::span<const double> alphas) {
  ExpPoly g = f;
  for (double a : alphas) g = ep_apply_I(g, a);
  return g;
}

ExpPoly ep_apply_J(const ExpPoly& f, double alpha) {
  if (f.one_sided())
    throw std::invalid_argument("ep_apply_J: one-sided input not supported");
  // J^a f(x) = e^(a x) int_x^inf e^(-a t) f(t) dt; needs rate(f) < a termwise.
  std::vector<ExpPolyTerm> out;
  for (const auto& t : f.terms()) {
    const double c = t.rate - alpha;
    if (c >= -kRateTol)
      throw std::domain_error("ep_apply_J: divergent tail (rate >= alpha)");
    // int_x^inf s^k e^(c s) ds = -(primitive), recursively:
    // I_k = -x^k e^(cx)/c - (k/c) I_{k-1}, I_0 = -e^(cx)/c
    std::vector<ExpPolyTerm> part;
    antideriv_power_exp(t.coeff, t.power, c, part);
    // tail integral = -primitive(x) since primitive vanishes at +inf
    for (auto& p : part) {
      p.coeff = -p.coeff;
      p.rate += alpha;  // multiply back e^(a x)
      out.push_back(p);
    }
  }
  return ExpPoly(std::move(out), false);
}

ExpPoly ep_apply_J(const ExpPoly& f, std::span<const double> alphas) {
  ExpPoly g = f;
  for (double a : alphas) g = ep_apply_J(g, a);
  return g;
}

ExpPoly ep_convolve(const ExpPoly& f, const ExpPoly& g) {
  if (!f.one_sided() || !g.one_sided())
    throw std::invalid_argument("ep_convolve: both inputs must be one-sided");
  std::vector<ExpPolyTerm> out;
  for (const auto& a : f.terms()) {
    for (const auto& b : g.terms()) {
      // int_0^x t^p e^(la t) (x-t)^q e^(mu (x-t)) dt
      // expand (x-t)^q and integrate each power of t
      const int p = a.power, q = b.power;
      const double la = a.rate, mu = b.rate;
      const double c = la - mu;
      double binom = 1.0;
      for (int s = 0; s <= q; ++s) {
        const double sign = (s % 2 == 0) ? 1.0 : -1.0;
        const double coeff = a.coeff * b.coeff * binom * sign;
        const int tpow = p + s;     // t^(p+s) inside
        const int xpow = q - s;     // x^(q-s) outside
        if (std::fabs(c) < kRateTol) {
          // e^(mu x) x^(q-s) int_0^x t^(p+s) dt
          out.push_back({coeff / (tpow + 1), xpow + tpow + 1, mu});
        } else {
          // e^(mu x) x^(q-s) [F(x) - F(0)], F primitive of t^(p+s) e^(c t)
          std::vector<ExpPolyTerm> part;
          antideriv_power_exp(coeff, tpow, c, part);
          for (const auto& pe : part) {
            out.push_back({pe.coeff, pe.power + xpow, pe.rate + mu});
            if (pe.power == 0) out.push_back({-pe.coeff, xpow, mu});
          }
        }
        binom = binom * (q - s) / (s + 1);
      }
    }
  }
  return ExpPoly(std::move(out), true);
}

double ep_integrate(const ExpPoly& f, double a, double b) {
  const bool inf_upper = std::isinf(b);
  double lo = a;
  if (f.one_sided()) lo = std::max(a, 0.0);
  if (inf_upper) {
    // F(x) -> limit exists only if all rates < 0 (constant term handled below)
    const ExpPoly F = f.antiderivative0();
    double limit = 0.0;
    for (const auto& t : F.terms()) {
      if (t.rate < -kRateTol) continue;  // decays
      if (t.rate > kRateTol || t.power > 0)
        throw std::domain_error("ep_integrate: divergent integral to infinity");
      limit += t.coeff;  // constant part of the primitive
    }
    return limit - F(lo);
  }
  if (f.one_sided() && b <= 0.0) return 0.0;
  const ExpPoly F = f.antiderivative0();
  return F(b) - F(lo);
}

double ep_tail_mass(const ExpPoly& f) {
  return ep_integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

ExpPoly ep_solve_adjoint(const ExpPoly& f) {
  if (f.one_sided())
    throw std::invalid_argument("ep_solve_adjoint: input must be two-sided");
  // Particular solution per rate group; operator L h = h''/2 + h' acts as
  // L(x^j e^(lx)) = (l^2/2 + l) x^j e^(lx) + j (l+1) x^(j-1) e^(lx)
  //                 + j(j-1)/2 x^(j-2) e^(lx).
  // Group terms by rate and back-substitute from the top degree.
  std::vector<ExpPolyTerm> particular;
  std::vector<ExpPolyTerm> pending = f.terms();
  std::sort(pending.begin(), pending.end(),
            [](const auto& a, const auto& b) { return a.rate < b.rate; });
  std::size_t i = 0;
  while (i < pending.size()) {
    std::size_t j = i;
    const double l = pending[i].rate;
    while (j < pending.size() && rates_equal(pending[j].rate, l)) ++j;
    // rhs coefficients by power for this rate group
    int kmax = 0;
    for (std::size_t k = i; k < j; ++k) kmax = std::max(kmax, pending[k].power);
    const bool resonant = rates_equal(l, 0.0) || rates_equal(l, -2.0);
    const int deg = kmax + (resonant ? 1 : 0);
    std::vector<double> rhs(kmax + 1, 0.0);
    for (std::size_t k = i; k < j; ++k) rhs[pending[k].power] += pending[k].coeff;
    // Solve for h = sum_{m<=deg} h_m x^m e^(lx); L maps x^m e^(lx) to
    // diag x^m + m(l+1) x^(m-1) + m(m-1)/2 x^(m-2), all times e^(lx),
    // with diag = l^2/2 + l (zero exactly when l is resonant).
    const double diag = 0.5 * l * l + l;
    std::vector<double> h(deg + 1, 0.0);
    std::vector<double> residual = rhs;
    residual.resize(deg + 1, 0.0);
    if (!resonant) {
      for (int m = deg; m >= 0; --m) {
        const double hm = residual[m] / diag;
        h[m] = hm;
        residual[m] -= diag * hm;
        if (m - 1 >= 0) residual[m - 1] -= hm * m * (l + 1.0);
        if (m - 2 >= 0) residual[m - 2] -= hm * m * (m - 1) * 0.5;
      }
    } else {
      // diag == 0, so the x^(m-1) coefficient determines h_m; x^0 e^(lx) is a
      // homogeneous solution and stays free (set to zero).
      const double s = l + 1.0;  // +1 for l=0, -1 for l=-2
      for (int m = deg; m >= 1; --m) {
        const double hm = residual[m - 1] / (m * s);
        h[m] = hm;
        residual[m - 1] -= hm * m * s;
        if (m - 2 >= 0) residual[m - 2] -= hm * m * (m - 1) * 0.5;
      }
    }
    for (int m = 0; m <= deg; ++m) {
      if (h[m] != 0.0) particular.push_back({h[m], m, l});
    }
    for (int m = 0; m <= deg; ++m) {
      if (std::fabs(residual[m]) > 1e-10 * (1.0 + f.max_abs_coeff()))
        throw std::runtime_error("ep_solve_adjoint: residual not eliminated");
    }
    i = j;
  }
  ExpPoly h(std::move(particular), false);
  // Add homogeneous A + B e^(-2x) for h(0) = h'(0) = 0.
  const double h0 = h(0.0);
  const double hp0 = h.derivative()(0.0);
  const double B = hp0 / 2.0;
  const double A = -h0 - B;
  std::vector<ExpPolyTerm> hom;
  if (A != 0.0) hom.push_back({A, 0, 0.0});
  if (B != 0.0) hom.push_back({B, 0, -2.0});
  return h + ExpPoly(std::move(hom), false);
}

ExpPoly ep_nested_ordered(std::span<const ExpPoly> factors) {
  ExpPoly g = ExpPoly::constant(1.0);
  for (const auto& u : factors) {
    g = (u * g).antiderivative0();
  }
  return g;
}

bool ep_approx_equal(const ExpPoly& f, const ExpPoly& g, double tol) {
  const ExpPoly d = f - g;
  const double scale = 1.0 + std::max(f.max_abs_coeff(), g.max_abs_coeff());
  return d.max_abs_coeff() <= tol * scale;
}

}  // namespace flatlpp
