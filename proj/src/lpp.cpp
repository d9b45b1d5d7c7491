#include "flatlpp/lpp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace flatlpp {

FlatLppField::FlatLppField(const WeightField& env) : n_(env.triangle_n()) {
  g_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
  for (int i = n_; i >= 1; --i)
    for (int j = n_ + 1 - i; j >= 1; --j) {
      const double below = (i + 1) + j <= n_ + 1 ? at(i + 1, j) : 0.0;
      const double right = i + (j + 1) <= n_ + 1 ? at(i, j + 1) : 0.0;
      g_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)] =
          std::max(below, right) + env.weight(i, j);
    }
}

double FlatLppField::at(int i, int j) const {
  if (i < 1 || j < 1 || i + j > n_ + 1)
    throw std::out_of_range("FlatLppField::at: outside triangle");
  return g_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
}

std::vector<double> FlatLppField::first_row_reversed() const {
  std::vector<double> v(static_cast<std::size_t>(n_));
  for (int j = 0; j < n_; ++j) v[static_cast<std::size_t>(j)] = at(1, n_ - j);
  return v;
}

double flat_lpp_enumerate(const WeightField& env, int i, int j) {
  const int n = env.triangle_n();
  if (i + j > n + 1) throw std::out_of_range("flat_lpp_enumerate: outside triangle");
  const double w = env.weight(i, j);
  if (i + j == n + 1) return w;
  double best = -std::numeric_limits<double>::infinity();
  if (i + 1 + j <= n + 1) best = std::max(best, flat_lpp_enumerate(env, i + 1, j));
  if (i + j + 1 <= n + 1) best = std::max(best, flat_lpp_enumerate(env, i, j + 1));
  return w + best;
}

std::vector<std::vector<double>> particle_chain_trajectory(
    const WeightField& env, const std::vector<double>& x) {
  if (env.triangle()) throw std::invalid_argument("particle_chain_trajectory: needs rectangle");
  const int n = env.rows(), m = env.cols();
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("particle_chain_trajectory: start size mismatch");
  for (int j = 1; j < n; ++j)
    if (x[static_cast<std::size_t>(j)] < x[static_cast<std::size_t>(j - 1)])
      throw std::invalid_argument("particle_chain_trajectory: start not ordered");
  std::vector<std::vector<double>> traj;
  traj.reserve(static_cast<std::size_t>(m) + 1);
  traj.push_back(x);
  for (int k = 1; k <= m; ++k) {
    std::vector<double> next(static_cast<std::size_t>(n));
    const auto& prev = traj.back();
    for (int j = 0; j < n; ++j) {
      double lower = prev[static_cast<std::size_t>(j)];
      if (j > 0) lower = std::max(lower, next[static_cast<std::size_t>(j - 1)]);
      next[static_cast<std::size_t>(j)] = lower + env.weight(j + 1, k);
    }
    traj.push_back(std::move(next));
  }
  return traj;
}

std::vector<std::vector<double>> growing_chain_rows(const WeightField& env) {
  const int n = env.triangle_n();
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(n) + 1);
  std::vector<double> cur;  // row i as (G(i, n-i+1), ..., G(i, 1))
  for (int i = n; i >= 1; --i) {
    const int len = n - i + 1;
    std::vector<double> next(static_cast<std::size_t>(len));
    next[0] = env.weight(i, n - i + 1);
    for (int p = 2; p <= len; ++p) {
      const double old_below = cur[static_cast<std::size_t>(p - 2)];
      const double fresh = next[static_cast<std::size_t>(p - 2)];
      next[static_cast<std::size_t>(p - 1)] =
          std::max(old_below, fresh) + env.weight(i, n - i + 2 - p);
    }
    cur = next;
    rows[static_cast<std::size_t>(i)] = std::move(next);
  }
  return rows;
}

double p2p_lpp_top(const WeightField& env) {
  if (env.triangle()) throw std::invalid_argument("p2p_lpp_top: needs full rectangle");
  const int rows = env.rows(), cols = env.cols();
  std::vector<double> acc(static_cast<std::size_t>(cols), 0.0);
  for (int i = 1; i <= rows; ++i)
    for (int j = 1; j <= cols; ++j) {
      double best = 0.0;
      if (i > 1 && j > 1)
        best = std::max(acc[static_cast<std::size_t>(j - 1)],
                        acc[static_cast<std::size_t>(j - 2)]);
      else if (i > 1)
        best = acc[static_cast<std::size_t>(j - 1)];
      else if (j > 1)
        best = acc[static_cast<std::size_t>(j - 2)];
      acc[static_cast<std::size_t>(j - 1)] = best + env.weight(i, j);
    }
  return acc[static_cast<std::size_t>(cols - 1)];
}

WeightField symmetrize_square(const WeightField& tri, SymmetrizationRule rule) {
  const int n = tri.triangle_n();
  std::vector<double> rates(static_cast<std::size_t>(n) * n);
  std::vector<double> weights(rates.size());
  const double diag_scale = rule == SymmetrizationRule::diagonal_doubled ? 2.0 : 0.5;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      int si = i, sj = j;
      if (i + j > n + 1) {
        si = n + 1 - j;
        sj = n + 1 - i;
      }
      const double scale = i + j == n + 1 ? diag_scale : 1.0;
      const std::size_t k =
          static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1);
      rates[k] = tri.rate(si, sj);
      weights[k] = scale * tri.weight(si, sj);
    }
  return WeightField::from_values(n, n, false, std::move(rates), std::move(weights));
}

}  // namespace flatlpp
