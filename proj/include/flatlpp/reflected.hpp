// Systems of ordered reflecting Brownian particles above a wall, their
// triangular running-supremum arrays, and the interacting diffusion on the
// staircase triangle in log coordinates (drifts, reversed drifts, potential,
// divergence identities, tamed Euler simulation).
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "flatlpp/path_bundle.hpp"

namespace flatlpp {

// Grid Skorokhod recursion for the wall system with drifts -alphas:
//   Y_1(t_k) = max(Y_1(t_{k-1}) + dB_1, 0),
//   Y_j(t_k) = max(Y_j(t_{k-1}) + dB_j, Y_{j-1}(t_k));
// this reproduces the running-supremum formulas exactly on the grid.
// Returns trajectory[k][j-1] = Y_j(t_k).
std::vector<std::vector<double>> wall_trajectory(const PathBundle& paths,
                                                 std::span<const double> alphas);

// Same recursion with exact per-step bridge minima: the bottom particle
// follows its exact law at any step size; higher particles add a candidate
// with the lower particle frozen across the step.
std::vector<std::vector<double>> wall_trajectory_refined(const PathBundle& paths,
                                                         std::span<const double> alphas);

std::vector<double> wall_final(const PathBundle& paths, std::span<const double> alphas,
                               bool refined);

// Triangular array Z_j^k (1 <= j <= k <= n) built from the wall-free
// recursion; Brownian component m (1-based) carries drift -alpha_{n-m+1}
// and Z_j^k is driven by component n-k+j. Returns z[k][j], 1-based.
std::vector<std::vector<double>> z_array_final(const PathBundle& paths,
                                               std::span<const double> alphas);

// sup over the grid of Z_n^n, optionally refined by the exact bridge
// maximum of the driving component within each step.
double z_top_running_sup(const PathBundle& paths, std::span<const double> alphas,
                         bool refined);

// --- interacting array on the triangle ---

// State indexed by the triangle cells {i + j <= n + 1}, 1-based.
struct XArrayState {
  explicit XArrayState(int n_in) : n(n_in), x(static_cast<std::size_t>(n_in) * n_in, 0.0) {}
  double& at(int i, int j) {
    return x[static_cast<std::size_t>(i - 1) * n + (j - 1)];
  }
  double at(int i, int j) const {
    return x[static_cast<std::size_t>(i - 1) * n + (j - 1)];
  }
  int n = 0;
  std::vector<double> x;
};

// Cells with a down-right boundary: if (i,j) is in S, every (i+k, j+l)
// inside the triangle is too. The full triangle is the maximal such set.
class DownRightSet {
 public:
  DownRightSet(int n, std::vector<std::pair<int, int>> cells);
  static DownRightSet full_triangle(int n);

  int n() const { return n_; }
  const std::vector<std::pair<int, int>>& cells() const { return cells_; }
  bool contains(int i, int j) const;

 private:
  int n_;
  std::vector<std::pair<int, int>> cells_;
  std::vector<std::uint8_t> mask_;
};

// Forward drift (stationary dynamics), reversed drift, their difference and
// the potential with its gradient, all restricted to S; component order
// follows S.cells().
struct DriftPotential {
  std::vector<double> forward;   // b
  std::vector<double> reversed;  // a
  std::vector<double> diff;      // d = b - a
  std::vector<double> grad_v;
  double v = 0.0;
};
DriftPotential drift_and_potential(std::span<const double> alphas, const XArrayState& state,
                                   const DownRightSet& s);

// Divergence of the drift difference, assembled bond by bond so the exact
// cancellation is preserved in floating point (returns exactly 0).
double divergence_d(std::span<const double> alphas, const XArrayState& state,
                    const DownRightSet& s);

// One-vertex increments of the inductive decomposition at bulk cell (i, j):
// values at (i, j), (i, j+1), (i+1, j).
std::array<double, 3> dstar_components(std::span<const double> alphas,
                                       const XArrayState& state, int i, int j);
double vstar(std::span<const double> alphas, const XArrayState& state, int i, int j);
std::array<double, 3> vstar_grad(std::span<const double> alphas, const XArrayState& state,
                                 int i, int j);

// Tamed Euler simulation of the array diffusion over the full triangle.
enum class XDirection { forward, reversed };

struct XArraySim {
  XArrayState state;
  double tamed_fraction = 0.0;  // share of (cell, step) updates tamed by >= 10%
  bool blew_up = false;
  double elapsed = 0.0;  // simulated time actually reached
};

XArraySim x_array_simulate(std::span<const double> alphas, XArrayState init, double T,
                           double dt, XDirection direction, std::uint64_t seed,
                           std::uint64_t replica);

}  // namespace flatlpp
