// Last passage percolation over weight fields: the point-to-line passage
// times on the staircase triangle, a brute-force path-enumeration oracle,
// pushing particle chains (fixed count and growing), and point-to-point
// passage times over symmetrized square environments.
#pragma once

#include <vector>

#include "flatlpp/weight_field.hpp"

namespace flatlpp {

// G(i, j) = max(G(i+1, j), G(i, j+1)) + e_ij on {i + j <= n + 1}, where
// absent neighbours count as zero; G(1, 1) is the point-to-line time.
class FlatLppField {
 public:
  explicit FlatLppField(const WeightField& env);

  int n() const { return n_; }
  double at(int i, int j) const;  // 1-based
  double top() const { return at(1, 1); }
  // (G(1, n), G(1, n-1), ..., G(1, 1)): ascending, one value per particle.
  std::vector<double> first_row_reversed() const;

 private:
  int n_ = 0;
  std::vector<double> g_;
};

// Maximum over explicit up-right lattice paths from (i, j) to the
// anti-diagonal; exponential in n, for cross-checking the recursion.
double flat_lpp_enumerate(const WeightField& env, int i, int j);

// Pushing chain G_j(k) = max(G_j(k-1), G_{j-1}(k)) + e_jk over a rectangle
// environment (row j = particle, column k = step) started from positions x;
// returns the trajectory, trajectory[k] = positions after k steps.
std::vector<std::vector<double>> particle_chain_trajectory(
    const WeightField& env, const std::vector<double>& x);

// Growing chain over a triangle environment: one new bottom particle per
// step. Row i of the result (i = n..1 processed order, returned indexed by
// i) equals (G(i, n-i+1), ..., G(i, 1)).
std::vector<std::vector<double>> growing_chain_rows(const WeightField& env);

// Up-right point-to-point passage time from (1, 1) to (rows, cols).
double p2p_lpp_top(const WeightField& env);

// Square environment mirrored across the anti-diagonal. The diagonal cells
// are doubled or halved depending on the rule; only the doubled rule makes
// the point-to-point time equal twice the point-to-line time pathwise.
enum class SymmetrizationRule { diagonal_doubled, diagonal_halved };
WeightField symmetrize_square(const WeightField& tri, SymmetrizationRule rule);

}  // namespace flatlpp
