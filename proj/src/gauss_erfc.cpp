#include "flatlpp/gauss_erfc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "flatlpp/math_util.hpp"

namespace flatlpp {

namespace {

constexpr double kTol = 1e-11;
constexpr int kMaxPower = 40;

bool close(double a, double b) { return std::fabs(a - b) < kTol; }

double binom(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

// Primitive of w^k e^(c w) (c != 0) as plain terms; vanishes at +inf if c < 0.
void primitive_power_exp(double coeff, int k, double c, std::vector<GeTerm>& out) {
  double fac = coeff;
  for (int r = 0; r <= k; ++r) {
    out.push_back({fac / std::pow(c, r + 1) * ((r % 2 == 0) ? 1.0 : -1.0), k - r, c,
                   GeKind::plain, 0.0, 0.0});
    fac *= (k - r);
  }
}

// Symbolic T_j(z) = int_z^inf e^(c w) (w - m)^j phi((w - m)/sigma) dw.
// Returns a vector of T_0..T_jmax as term lists.
std::vector<std::vector<GeTerm>> gauss_tail_layers(int jmax, double c, double m,
                                                   double sigma) {
  std::vector<std::vector<GeTerm>> T(jmax + 1);
  // T_0 = sigma e^(c m + c^2 s^2 / 2) Q((z-m)/s - c s)
  T[0].push_back({sigma * std::exp(c * m + 0.5 * c * c * sigma * sigma), 0, 0.0,
                  GeKind::tail, 1.0 / sigma, -m / sigma - c * sigma});
  for (int j = 1; j <= jmax; ++j) {
    std::vector<GeTerm> terms;
    const double s2 = sigma * sigma;
    if (j >= 2) {
      for (auto t : T[j - 2]) {
        t.coeff *= s2 * (j - 1);
        terms.push_back(t);
      }
    }
    for (auto t : T[j - 1]) {
      t.coeff *= s2 * c;
      terms.push_back(t);
    }
    // s2 (z - m)^(j-1) e^(c z) phi((z-m)/sigma), expanded in powers of z
    for (int r = 0; r <= j - 1; ++r) {
      terms.push_back({s2 * binom(j - 1, r) * std::pow(-m, j - 1 - r), r, c,
                       GeKind::gauss, 1.0 / sigma, -m / sigma});
    }
    T[j] = std::move(terms);
  }
  return T;
}

// int_z^inf P(w) phi(s w + d) dw for a plain term P = coeff w^q e^(r w),
// with s > 0. Appends symbolic terms in z.
void tail_integral_plain_times_phi(double coeff, int q, double r, double s,
                                   double d, std::vector<GeTerm>& out) {
  const double sigma = 1.0 / s;
  const double m = -d / s;
  auto T = gauss_tail_layers(q, r, m, sigma);
  // w^q = sum_j binom(q, j) m^(q-j) (w - m)^j
  for (int j = 0; j <= q; ++j) {
    const double w = coeff * binom(q, j) * std::pow(m, q - j);
    if (w == 0.0) continue;
    for (auto t : T[j]) {
      t.coeff *= w;
      out.push_back(t);
    }
  }
}

}  // namespace

GaussErfcFun::GaussErfcFun(std::vector<GeTerm> terms) : terms_(std::move(terms)) {
  canonicalize();
}

GaussErfcFun GaussErfcFun::zero() { return GaussErfcFun(std::vector<GeTerm>{}); }

GaussErfcFun GaussErfcFun::heat_kernel(double t) {
  if (!(t > 0.0)) throw std::invalid_argument("heat_kernel: t must be > 0");
  const double s = 1.0 / std::sqrt(t);
  return GaussErfcFun({{s, 0, 0.0, GeKind::gauss, s, 0.0}});
}

void GaussErfcFun::canonicalize() {
  std::vector<GeTerm> norm;
  norm.reserve(terms_.size());
  for (GeTerm t : terms_) {
    if (t.power < 0 || t.power > kMaxPower)
      throw std::invalid_argument("GaussErfcFun: power out of range");
    if (!std::isfinite(t.coeff) || !std::isfinite(t.rate) ||
        !std::isfinite(t.scale) || !std::isfinite(t.shift))
      throw std::invalid_argument("GaussErfcFun: non-finite term");
    if (t.kind == GeKind::gauss) {
      if (t.scale == 0.0) {  // degenerate: constant phi(shift)
        t = {t.coeff * norm_pdf(t.shift), t.power, t.rate, GeKind::plain, 0.0, 0.0};
      } else if (t.scale < 0.0) {  // phi is even
        t.scale = -t.scale;
        t.shift = -t.shift;
      }
    } else if (t.kind == GeKind::tail && t.scale == 0.0) {
      t = {t.coeff * norm_tail(t.shift), t.power, t.rate, GeKind::plain, 0.0, 0.0};
    }
    if (t.kind == GeKind::plain) {
      t.scale = 0.0;
      t.shift = 0.0;
    }
    norm.push_back(t);
  }
  std::sort(norm.begin(), norm.end(), [](const GeTerm& a, const GeTerm& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (!close(a.rate, b.rate)) return a.rate < b.rate;
    if (a.power != b.power) return a.power < b.power;
    if (!close(a.scale, b.scale)) return a.scale < b.scale;
    return a.shift < b.shift;
  });
  terms_.clear();
  for (const auto& t : norm) {
    if (!terms_.empty()) {
      auto& p = terms_.back();
      if (p.kind == t.kind && p.power == t.power && close(p.rate, t.rate) &&
          close(p.scale, t.scale) && close(p.shift, t.shift)) {
        p.coeff += t.coeff;
        continue;
      }
    }
    terms_.push_back(t);
  }
  double cmax = 0.0;
  for (const auto& t : terms_) cmax = std::max(cmax, std::fabs(t.coeff));
  std::vector<GeTerm> kept;
  for (const auto& t : terms_) {
    if (std::fabs(t.coeff) > 1e-14 * cmax) kept.push_back(t);
  }
  terms_ = std::move(kept);
}

double GaussErfcFun::operator()(double z) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    const double base = t.coeff * std::pow(z, t.power);
    if (base == 0.0) continue;
    double log_extra = 0.0;
    switch (t.kind) {
      case GeKind::plain:
        log_extra = t.rate * z;
        break;
      case GeKind::gauss: {
        const double u = t.scale * z + t.shift;
        log_extra = t.rate * z - 0.5 * u * u;
        sum += base * kInvSqrt2Pi * std::exp(log_extra);
        continue;
      }
      case GeKind::tail: {
        const double u = t.scale * z + t.shift;
        log_extra = t.rate * z + log_norm_tail(u);
        break;
      }
    }
    sum += base * std::exp(log_extra);
  }
  return sum;
}

GaussErfcFun GaussErfcFun::operator+(const GaussErfcFun& o) const {
  std::vector<GeTerm> t = terms_;
  t.insert(t.end(), o.terms_.begin(), o.terms_.end());
  return GaussErfcFun(std::move(t));
}

GaussErfcFun GaussErfcFun::operator-(const GaussErfcFun& o) const {
  return *this + o.scaled(-1.0);
}

GaussErfcFun GaussErfcFun::scaled(double c) const {
  std::vector<GeTerm> t = terms_;
  for (auto& x : t) x.coeff *= c;
  return GaussErfcFun(std::move(t));
}

GaussErfcFun GaussErfcFun::times_exp(double c) const {
  std::vector<GeTerm> t = terms_;
  for (auto& x : t) x.rate += c;
  return GaussErfcFun(std::move(t));
}

GaussErfcFun GaussErfcFun::reflect() const {
  std::vector<GeTerm> t;
  t.reserve(terms_.size());
  for (const auto& a : terms_) {
    GeTerm r = a;
    r.coeff *= (a.power % 2 == 0) ? 1.0 : -1.0;
    r.rate = -a.rate;
    r.scale = -a.scale;  // canonicalize() restores sign conventions
    t.push_back(r);
  }
  return GaussErfcFun(std::move(t));
}

GaussErfcFun GaussErfcFun::shift_arg(double s) const {
  // g(z) = f(z - s)
  std::vector<GeTerm> out;
  for (const auto& a : terms_) {
    const double eshift = std::exp(-a.rate * s);
    for (int r = 0; r <= a.power; ++r) {
      GeTerm t = a;
      t.coeff = a.coeff * eshift * binom(a.power, r) * std::pow(-s, a.power - r);
      t.power = r;
      if (a.kind != GeKind::plain) t.shift = a.shift - a.scale * s;
      out.push_back(t);
    }
  }
  return GaussErfcFun(std::move(out));
}

GaussErfcFun GaussErfcFun::derivative() const {
  std::vector<GeTerm> out;
  for (const auto& a : terms_) {
    if (a.power > 0)
      out.push_back({a.coeff * a.power, a.power - 1, a.rate, a.kind, a.scale, a.shift});
    if (a.rate != 0.0)
      out.push_back({a.coeff * a.rate, a.power, a.rate, a.kind, a.scale, a.shift});
    if (a.kind == GeKind::gauss) {
      // phi'(u) = -u phi(u), u = scale z + shift
      out.push_back({-a.coeff * a.scale * a.scale, a.power + 1, a.rate, GeKind::gauss,
                     a.scale, a.shift});
      out.push_back({-a.coeff * a.scale * a.shift, a.power, a.rate, GeKind::gauss,
                     a.scale, a.shift});
    } else if (a.kind == GeKind::tail) {
      out.push_back({-a.coeff * a.scale, a.power, a.rate, GeKind::gauss, a.scale,
                     a.shift});
    }
  }
  return GaussErfcFun(std::move(out));
}

std::string GaussErfcFun::str() const {
  std::ostringstream os;
  if (terms_.empty()) return "0";
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << t.coeff;
    if (t.power > 0) os << "*z^" << t.power;
    if (t.rate != 0.0) os << "*e^(" << t.rate << "z)";
    if (t.kind == GeKind::gauss) os << "*phi(" << t.scale << "z+" << t.shift << ")";
    if (t.kind == GeKind::tail) os << "*Q(" << t.scale << "z+" << t.shift << ")";
  }
  return os.str();
}

GaussErfcFun ge_apply_D(const GaussErfcFun& f, double alpha) {
  return f.derivative() - f.scaled(alpha);
}

GaussErfcFun ge_apply_D(const GaussErfcFun& f, std::span<const double> alphas) {
  GaussErfcFun g = f;
  for (double a : alphas) g = ge_apply_D(g, a);
  return g;
}

GaussErfcFun ge_apply_J(const GaussErfcFun& f, double beta) {
  std::vector<GeTerm> out;
  for (const auto& t : f.terms()) {
    const double c = t.rate - beta;
    switch (t.kind) {
      case GeKind::plain: {
        if (c >= -kTol)
          throw std::domain_error("ge_apply_J: divergent tail for plain term");
        std::vector<GeTerm> prim;
        primitive_power_exp(t.coeff, t.power, c, prim);
        for (auto p : prim) {
          p.coeff = -p.coeff;  // int_z^inf = -primitive(z)
          p.rate += beta;
          out.push_back(p);
        }
        break;
      }
      case GeKind::gauss: {
        std::vector<GeTerm> part;
        tail_integral_plain_times_phi(t.coeff, t.power, c, t.scale, t.shift, part);
        for (auto p : part) {
          p.rate += beta;
          out.push_back(p);
        }
        break;
      }
      case GeKind::tail: {
        const bool lower = t.scale < 0.0;
        std::vector<GeTerm> prim;  // primitive of w^k e^(c w)
        if (std::fabs(c) < kTol) {
          if (lower)
            throw std::domain_error("ge_apply_J: divergent tail for lower-tail term");
          prim.push_back({t.coeff / (t.power + 1), t.power + 1, 0.0, GeKind::plain,
                          0.0, 0.0});
        } else {
          if (lower && c > 0.0)
            throw std::domain_error("ge_apply_J: divergent tail for lower-tail term");
          primitive_power_exp(t.coeff, t.power, c, prim);
        }
        // J = e^(bz) [ -P(z) Q(s z + d) + s int_z^inf P(w) phi(s w + d) dw ]
        for (const auto& p : prim) {
          out.push_back({-p.coeff, p.power, p.rate + beta, GeKind::tail, t.scale,
                         t.shift});
        }
        const double sa = std::fabs(t.scale);
        const double da = t.shift * (t.scale > 0 ? 1.0 : -1.0);
        for (const auto& p : prim) {
          std::vector<GeTerm> part;
          tail_integral_plain_times_phi(t.scale * p.coeff, p.power, p.rate, sa, da,
                                        part);
          for (auto q : part) {
            q.rate += beta;
            out.push_back(q);
          }
        }
        break;
      }
    }
  }
  return GaussErfcFun(std::move(out));
}

GaussErfcFun ge_apply_J(const GaussErfcFun& f, std::span<const double> betas) {
  GaussErfcFun g = f;
  for (double b : betas) g = ge_apply_J(g, b);
  return g;
}

GaussErfcFun ge_apply_L(const GaussErfcFun& f, double beta) {
  return ge_apply_J(f.reflect(), beta).reflect();
}

GaussErfcFun ge_apply_L(const GaussErfcFun& f, std::span<const double> betas) {
  GaussErfcFun g = f;
  for (double b : betas) g = ge_apply_L(g, b);
  return g;
}

GaussErfcFun ge_tail_integral(const GaussErfcFun& f) { return ge_apply_J(f, 0.0); }

double ge_integrate_from(const GaussErfcFun& f, double lo) {
  return ge_tail_integral(f)(lo);
}

double ge_integrate_all(const GaussErfcFun& f) {
  return ge_integrate_from(f, 0.0) + ge_integrate_from(f.reflect(), 0.0);
}

GaussErfcFun ge_killed_kernel(double t, double x) {
  const GaussErfcFun phi = GaussErfcFun::heat_kernel(t);
  return phi.shift_arg(x) - phi.shift_arg(-x);
}

GaussErfcFun ge_kernel_entry(double t, double x, std::span<const double> j_rates,
                             std::span<const double> d_rates) {
  // psi_t(x, y) = phi_t(y - x) - phi_t(y + x). A J_x chain acts on the
  // translation part through L and on the reflection part through J, both in
  // the single variable z; the D_y chain then acts directly.
  const GaussErfcFun phi = GaussErfcFun::heat_kernel(t);
  GaussErfcFun a = ge_apply_L(phi, j_rates);
  GaussErfcFun b = ge_apply_J(phi, j_rates);
  a = ge_apply_D(a, d_rates);
  b = ge_apply_D(b, d_rates);
  return a.shift_arg(x) - b.shift_arg(-x);
}

GaussErfcFun ge_reflected_density(double t, double alpha, double x) {
  const std::vector<double> j{-alpha};
  const std::vector<double> d{alpha};
  GaussErfcFun entry = ge_kernel_entry(t, x, j, d);
  // prefactor e^(-alpha (y - x) - alpha^2 t / 2)
  const double c = std::exp(alpha * x - 0.5 * alpha * alpha * t);
  return entry.times_exp(-alpha).scaled(c);
}

}  // namespace flatlpp
