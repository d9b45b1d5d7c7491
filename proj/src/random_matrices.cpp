#include "flatlpp/random_matrices.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "flatlpp/path_bundle.hpp"
#include "flatlpp/rng.hpp"

namespace flatlpp {

namespace {

void check_alphas(std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("rate vector must be non-empty");
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("rates must be positive");
  }
}

double top_eigenvalue(const Eigen::MatrixXcd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  if (n <= 3) {
    solver.computeDirect(a, Eigen::EigenvaluesOnly);
  } else {
    solver.compute(a, Eigen::EigenvaluesOnly);
  }
  return solver.eigenvalues()(n - 1);
}

}  // namespace

double sup_lambda_max(std::span<const double> alphas, double T, double dt, bool refined,
                      std::uint64_t seed, std::uint64_t replica) {
  check_alphas(alphas);
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("need T, dt > 0");
  const int n = static_cast<int>(alphas.size());
  const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  const double sdt = std::sqrt(dt);
  const double shalf = std::sqrt(0.5 * dt);

  CounterRng entries(seed, StreamTag::path, hash_combine(replica, 0x68626dULL), 0);
  CounterRng bridges(seed, StreamTag::path, hash_combine(replica, 0x68626dULL), 1);

  double sup = 0.0;  // lambda_max at time zero
  if (n == 2) {
    // closed-form top eigenvalue of a 2x2 Hermitian matrix
    double h11 = 0.0, h22 = 0.0, re = 0.0, im = 0.0;
    double prev = 0.0;
    for (int k = 1; k <= steps; ++k) {
      h11 += sdt * entries.gaussian();
      h22 += sdt * entries.gaussian();
      re += shalf * entries.gaussian();
      im += shalf * entries.gaussian();
      const double t = dt * k;
      const double a = h11 - t * alphas[0];
      const double b = h22 - t * alphas[1];
      const double lam = 0.5 * (a + b) +
                         std::sqrt(0.25 * (a - b) * (a - b) + re * re + im * im);
      if (refined) {
        sup = std::max(sup, bridge_max(prev, lam, dt, bridges.uniform()));
      } else {
        sup = std::max(sup, lam);
      }
      prev = lam;
    }
    return sup;
  }

  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  double prev = 0.0;
  for (int k = 1; k <= steps; ++k) {
    for (int i = 0; i < n; ++i) {
      h(i, i) += sdt * entries.gaussian();
      for (int j = i + 1; j < n; ++j) {
        const std::complex<double> dz(shalf * entries.gaussian(),
                                      shalf * entries.gaussian());
        h(i, j) += dz;
        h(j, i) += std::conj(dz);
      }
    }
    Eigen::MatrixXcd a = h;
    const double t = dt * k;
    for (int i = 0; i < n; ++i) a(i, i) -= t * alphas[i];
    const double lam = top_eigenvalue(a);
    if (refined) {
      sup = std::max(sup, bridge_max(prev, lam, dt, bridges.uniform()));
    } else {
      sup = std::max(sup, lam);
    }
    prev = lam;
  }
  return sup;
}

std::vector<double> sample_loe(int n, std::uint64_t seed, std::uint64_t replica) {
  if (n < 1) throw std::invalid_argument("matrix size must be positive");
  CounterRng rng(seed, StreamTag::replica, hash_combine(replica, 0x6c6f65ULL));
  Eigen::MatrixXd x(n + 1, n);
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j < n; ++j) x(i, j) = rng.gaussian();
  }
  const Eigen::MatrixXd m = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + n);
}

std::vector<double> sample_sym_lue(std::span<const double> alphas, std::uint64_t seed,
                                   std::uint64_t replica) {
  check_alphas(alphas);
  const int n = static_cast<int>(alphas.size());
  CounterRng rng(seed, StreamTag::replica, hash_combine(replica, 0x736c7565ULL));
  Eigen::MatrixXcd x(n, n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(0.5 / alphas[i]);
    x(i, i) = std::complex<double>(s * rng.gaussian(), s * rng.gaussian());
    for (int j = i + 1; j < n; ++j) {
      const double so = std::sqrt(0.5 / (alphas[i] + alphas[j]));
      x(i, j) = std::complex<double>(so * rng.gaussian(), so * rng.gaussian());
      x(j, i) = x(i, j);  // symmetric, not conjugate
    }
  }
  const Eigen::MatrixXcd m = x.adjoint() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return std::vector<double>(ev.data(), ev.data() + n);
}

double sym_lue_pooled_density(double a1, double a2, double x) {
  if (!(a1 > 0.0) || !(a2 > 0.0)) throw std::invalid_argument("rates must be positive");
  if (a1 < a2) std::swap(a1, a2);
  if (a1 - a2 < 1e-9) throw std::invalid_argument("rates must be distinct");
  if (x <= 0.0) return 0.0;
  const double k = a1 * a2 * (a1 + a2) / (a1 - a2);
  // a randomly chosen eigenvalue: average of the top and bottom marginals
  const double bottom = k * std::exp(-(a1 + a2) * x) * (1.0 / a2 - 1.0 / a1);
  const double top = k * (std::exp(-a2 * x) * (1.0 - std::exp(-a1 * x)) / a1 -
                          std::exp(-a1 * x) * (1.0 - std::exp(-a2 * x)) / a2);
  return 0.5 * (top + bottom);
}

}  // namespace flatlpp
