// Point-to-line polymer partition functions: the discrete log-gamma polymer
// on the staircase triangle and the Brownian polymer given by a simplex
// integral of exponentiated drifted paths, plus an inverse-temperature scan
// against the zero-temperature grid supremum on the same paths.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flatlpp {

class WeightField;
class PathBundle;

// Log partition functions xi_ij = log zeta_ij on the triangle, where zeta_ij
// sums the products of weights over up-right paths from (i, j) to the
// anti-diagonal; built by the log-sum-exp form of
// zeta_ij = (zeta_{i,j+1} + zeta_{i+1,j}) W_ij.
class PolymerField {
 public:
  explicit PolymerField(const WeightField& env);
  int n() const { return n_; }
  double log_partition(int i, int j) const;

 private:
  int n_;
  std::vector<double> xi_;
};

// log of the point-to-line partition integral
//   int_{0=s_0<s_1<...<s_n<inf} exp(beta sum_i [B_i(s_i) - B_i(s_{i-1})]) ds,
// with B_i carrying drift -alphas[i-1]. Nested trapezoid rule in log space
// with step dt; time is extended in blocks of five units until two
// consecutive blocks change the integral by a relative amount below
// tail_tol. All drifts must be positive for the integral to converge.
double integrated_log_partition(std::span<const double> alphas, double beta, double dt,
                                double tail_tol, std::uint64_t seed,
                                std::uint64_t replica);

// Inverse-temperature scan on one fixed path bundle: for each beta, the
// scaled log partition (1/beta) log I_beta over [0, T] next to the grid
// supremum of the layered Skorokhod recursion on the same grid; the gap
// closes as beta grows.
struct BetaScan {
  double grid_sup = 0.0;
  std::vector<double> scaled_log_partition;
  std::vector<double> gap;
};
BetaScan beta_scan(std::span<const double> alphas, std::span<const double> betas,
                   const PathBundle& paths);

}  // namespace flatlpp
