#include "flatlpp/polymer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "flatlpp/math_util.hpp"
#include "flatlpp/path_bundle.hpp"
#include "flatlpp/rng.hpp"
#include "flatlpp/weight_field.hpp"

namespace flatlpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_alphas(std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("drift vector must be non-empty");
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("drift rates must be positive");
  }
}

// One evolving copy of the nested trapezoid integrals
//   h_k(t) = int_0^t exp(beta (B_k - B_{k+1})(u)) h_{k-1}(u) du,  h_0 = 1,
// with the outermost layer accumulated into log_i. Everything is kept in
// log space.
class SimplexIntegrator {
 public:
  SimplexIntegrator(int n, double beta, double dt)
      : n_(n), beta_(beta), dt_(dt), lh_(n, kNegInf), lf_prev_(n, kNegInf) {
    lf_prev_[0] = 0.0;  // integrand of h_1 at time zero: exp(0) * h_0 = 1
  }

  // Advance one step given the new values of the drifted paths b[i].
  void step(std::span<const double> b) {
    const double lhalf = std::log(0.5 * dt_);
    for (int k = 1; k <= n_; ++k) {
      const double diff = k < n_ ? b[k - 1] - b[k] : b[n_ - 1];
      const double lower = k >= 2 ? lh_[k - 2] : 0.0;
      const double lf = beta_ * diff + lower;
      const double contrib = lhalf + log_sum_exp(lf_prev_[k - 1], lf);
      if (k < n_) {
        lh_[k - 1] = log_sum_exp(lh_[k - 1], contrib);
      } else {
        log_i_ = log_sum_exp(log_i_, contrib);
      }
      lf_prev_[k - 1] = lf;
    }
  }

  double log_integral() const { return log_i_; }

 private:
  int n_;
  double beta_;
  double dt_;
  double log_i_ = kNegInf;
  std::vector<double> lh_;       // lh_[k-1] = log h_k, k = 1..n-1 (n-th unused)
  std::vector<double> lf_prev_;  // previous log integrand per layer
};

}  // namespace

PolymerField::PolymerField(const WeightField& env) : n_(env.triangle_n()) {
  xi_.assign(static_cast<std::size_t>(n_) * n_,
             std::numeric_limits<double>::quiet_NaN());
  for (int i = n_; i >= 1; --i) {
    for (int j = n_ + 1 - i; j >= 1; --j) {
      double v = std::log(env.weight(i, j));
      if (i + j < n_ + 1) {
        const double right = xi_[static_cast<std::size_t>(i - 1) * n_ + j];
        const double down = xi_[static_cast<std::size_t>(i) * n_ + (j - 1)];
        v += log_sum_exp(right, down);
      }
      xi_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)] = v;
    }
  }
}

double PolymerField::log_partition(int i, int j) const {
  if (i < 1 || j < 1 || i + j > n_ + 1) {
    throw std::out_of_range("cell outside the triangle");
  }
  return xi_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
}

double integrated_log_partition(std::span<const double> alphas, double beta, double dt,
                                double tail_tol, std::uint64_t seed,
                                std::uint64_t replica) {
  check_alphas(alphas);
  if (!(beta > 0.0) || !(dt > 0.0) || !(tail_tol > 0.0)) {
    throw std::invalid_argument("need beta, dt, tail_tol > 0");
  }
  const int n = static_cast<int>(alphas.size());
  std::vector<CounterRng> rngs;
  rngs.reserve(n);
  for (int i = 0; i < n; ++i) {
    rngs.emplace_back(seed, StreamTag::path, hash_combine(replica, 0x706f6c79ULL), i);
  }

  SimplexIntegrator integ(n, beta, dt);
  std::vector<double> b(n, 0.0);
  const double sdt = std::sqrt(dt);
  const int steps_per_block = static_cast<int>(std::ceil(5.0 / dt - 1e-9));
  const int max_blocks = 400;
  const double quiet = std::log1p(tail_tol);

  double prev_log = kNegInf;
  int quiet_blocks = 0;
  for (int block = 0; block < max_blocks; ++block) {
    for (int s = 0; s < steps_per_block; ++s) {
      for (int i = 0; i < n; ++i) {
        b[i] += sdt * rngs[i].gaussian() - alphas[i] * dt;
      }
      integ.step(b);
    }
    const double cur = integ.log_integral();
    if (std::isfinite(prev_log) && cur - prev_log < quiet) {
      if (++quiet_blocks >= 2) return cur;
    } else {
      quiet_blocks = 0;
    }
    prev_log = cur;
  }
  throw std::runtime_error("partition integral tail did not settle");
}

BetaScan beta_scan(std::span<const double> alphas, std::span<const double> betas,
                   const PathBundle& paths) {
  check_alphas(alphas);
  const int n = static_cast<int>(alphas.size());
  if (paths.components() < n) {
    throw std::invalid_argument("path bundle has fewer components than layers");
  }
  for (double beta : betas) {
    if (!(beta > 0.0)) throw std::invalid_argument("inverse temperatures must be positive");
  }
  const double dt = paths.dt();

  BetaScan out;
  // Layered Skorokhod recursion S_1 = drifted B_1, S_k reflected off S_{k-1};
  // the zero-temperature value is the grid supremum of the top layer.
  {
    std::vector<double> s(n, 0.0);
    double sup = 0.0;
    for (int i = 1; i <= paths.steps(); ++i) {
      for (int k = 1; k <= n; ++k) {
        const double db =
            paths.cum(k - 1, i) - paths.cum(k - 1, i - 1) - alphas[k - 1] * dt;
        double cand = s[k - 1] + db;
        if (k > 1) cand = std::max(cand, s[k - 2]);
        s[k - 1] = cand;
      }
      sup = std::max(sup, s[n - 1]);
    }
    out.grid_sup = sup;
  }

  std::vector<double> b(n);
  for (double beta : betas) {
    SimplexIntegrator integ(n, beta, dt);
    for (int i = 1; i <= paths.steps(); ++i) {
      for (int k = 0; k < n; ++k) {
        b[k] = paths.cum(k, i) - alphas[k] * paths.time(i);
      }
      integ.step(b);
    }
    const double scaled = integ.log_integral() / beta;
    out.scaled_log_partition.push_back(scaled);
    out.gap.push_back(std::abs(scaled - out.grid_sup));
  }
  return out;
}

}  // namespace flatlpp
