// Random matrix samplers tied to the point-to-line identities: the running
// supremum of the drifted Hermitian-Brownian top eigenvalue, Laguerre
// orthogonal ensemble eigenvalues, and the perturbed symmetric ensemble of
// complex symmetric Gaussians with rate-structured variances.
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace flatlpp {

// sup over the grid {0, dt, ..., T} of lambda_max(H(t) - t diag(alphas)),
// where H is a Hermitian Brownian motion (standard real Brownian motions on
// the diagonal, standard complex Brownian motions below it). With refined
// set, each step adds the exact bridge maximum of a unit-volatility bridge
// between consecutive top eigenvalues, correcting most of the grid bias.
double sup_lambda_max(std::span<const double> alphas, double T, double dt, bool refined,
                      std::uint64_t seed, std::uint64_t replica);

// Ascending eigenvalues of X^T X for X an (n+1) x n standard Gaussian matrix.
std::vector<double> sample_loe(int n, std::uint64_t seed, std::uint64_t replica);

// Ascending eigenvalues of X* X for a complex symmetric Gaussian X with
// per-component variance 1/(2(a_i + a_j)) off the diagonal and 1/(2 a_i) on
// it (so E|X_ij|^2 = 1/(a_i + a_j), E|X_ii|^2 = 1/a_i).
std::vector<double> sample_sym_lue(std::span<const double> alphas, std::uint64_t seed,
                                   std::uint64_t replica);

// Single-eigenvalue density of the n = 2 ensemble above (a randomly chosen
// one of the two eigenvalues), for distinct rates.
double sym_lue_pooled_density(double a1, double a2, double x);

}  // namespace flatlpp
