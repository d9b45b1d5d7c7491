#include "flatlpp/reflected.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "flatlpp/rng.hpp"

namespace flatlpp {

namespace {

void check_alphas(std::span<const double> alphas) {
  if (alphas.empty()) throw std::invalid_argument("drift vector must be non-empty");
  for (double a : alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("drift rates must be positive");
  }
}

void check_bundle(const PathBundle& paths, int n) {
  if (paths.components() < n) {
    throw std::invalid_argument("path bundle has fewer components than particles");
  }
}

std::vector<std::vector<double>> wall_run(const PathBundle& paths,
                                          std::span<const double> alphas, bool refined,
                                          bool record) {
  check_alphas(alphas);
  const int n = static_cast<int>(alphas.size());
  check_bundle(paths, n);
  const double dt = paths.dt();

  std::vector<double> y(n, 0.0);
  std::vector<double> prev(n, 0.0);
  std::vector<std::vector<double>> out;
  if (record) {
    out.reserve(paths.steps() + 1);
    out.push_back(y);
  }
  for (int k = 1; k <= paths.steps(); ++k) {
    prev = y;
    for (int j = 1; j <= n; ++j) {
      const double db =
          paths.cum(j - 1, k) - paths.cum(j - 1, k - 1) - alphas[j - 1] * dt;
      double cand = prev[j - 1] + db;
      if (refined) {
        // Candidate from the within-step minimum of the drifted driver; the
        // extreme of a bridge given its endpoints does not depend on drift,
        // so sampling it from the drifted endpoints is exact.
        const double a = paths.cum(j - 1, k - 1) - alphas[j - 1] * paths.time(k - 1);
        const double c = paths.cum(j - 1, k) - alphas[j - 1] * paths.time(k);
        const double m = bridge_min(a, c, dt, paths.bridge_uniform(j - 1, k));
        if (j == 1) {
          cand = std::max(cand, c - m);  // c - m >= 0, so the wall is respected
        } else {
          // Lower particle frozen at its previous value across the step.
          cand = std::max(cand, prev[j - 2] + (c - m));
        }
      }
      if (j == 1) {
        y[0] = refined ? cand : std::max(cand, 0.0);
      } else {
        y[j - 1] = std::max(cand, y[j - 2]);
      }
    }
    if (record) out.push_back(y);
  }
  if (!record) out.push_back(y);
  return out;
}

}  // namespace

std::vector<std::vector<double>> wall_trajectory(const PathBundle& paths,
                                                 std::span<const double> alphas) {
  return wall_run(paths, alphas, false, true);
}

std::vector<std::vector<double>> wall_trajectory_refined(const PathBundle& paths,
                                                         std::span<const double> alphas) {
  return wall_run(paths, alphas, true, true);
}

std::vector<double> wall_final(const PathBundle& paths, std::span<const double> alphas,
                               bool refined) {
  return wall_run(paths, alphas, refined, false).back();
}

std::vector<std::vector<double>> z_array_final(const PathBundle& paths,
                                               std::span<const double> alphas) {
  check_alphas(alphas);
  const int n = static_cast<int>(alphas.size());
  check_bundle(paths, n);
  const double dt = paths.dt();

  std::vector<std::vector<double>> z(n + 1);
  for (int k = 1; k <= n; ++k) z[k].assign(k + 1, 0.0);
  std::vector<double> inc(n + 1, 0.0);
  for (int i = 1; i <= paths.steps(); ++i) {
    for (int m = 1; m <= n; ++m) {
      // Component m carries drift -alpha_{n-m+1}.
      inc[m] = paths.cum(m - 1, i) - paths.cum(m - 1, i - 1) - alphas[n - m] * dt;
    }
    for (int k = 1; k <= n; ++k) {
      for (int j = 1; j <= k; ++j) {
        double cand = z[k][j] + inc[n - k + j];
        if (j > 1) cand = std::max(cand, z[k][j - 1]);
        z[k][j] = cand;
      }
    }
  }
  return z;
}

double z_top_running_sup(const PathBundle& paths, std::span<const double> alphas,
                         bool refined) {
  check_alphas(alphas);
  const int n = static_cast<int>(alphas.size());
  check_bundle(paths, n);
  const double dt = paths.dt();

  std::vector<double> z(n + 1, 0.0);
  double sup = 0.0;
  for (int i = 1; i <= paths.steps(); ++i) {
    if (refined) {
      // Within the step the top value moves with its driver while the layer
      // below it is frozen, so the excursion above the grid values is the
      // bridge maximum of the drifted top component.
      const double a = paths.cum(n - 1, i - 1) - alphas[0] * paths.time(i - 1);
      const double c = paths.cum(n - 1, i) - alphas[0] * paths.time(i);
      const double m = bridge_max(a, c, dt, paths.bridge_uniform(n - 1, i));
      sup = std::max(sup, z[n] + (m - a));
    }
    for (int j = 1; j <= n; ++j) {
      const double db =
          paths.cum(j - 1, i) - paths.cum(j - 1, i - 1) - alphas[n - j] * dt;
      double cand = z[j] + db;
      if (j > 1) cand = std::max(cand, z[j - 1]);
      z[j] = cand;
    }
    sup = std::max(sup, z[n]);
  }
  return sup;
}

DownRightSet::DownRightSet(int n, std::vector<std::pair<int, int>> cells)
    : n_(n), cells_(std::move(cells)), mask_(static_cast<std::size_t>(n) * n, 0) {
  if (n_ < 1) throw std::invalid_argument("array size must be positive");
  for (auto [i, j] : cells_) {
    if (i < 1 || j < 1 || i + j > n_ + 1) {
      throw std::invalid_argument("cell outside the triangle");
    }
    auto& m = mask_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)];
    if (m) throw std::invalid_argument("duplicate cell");
    m = 1;
  }
  for (auto [i, j] : cells_) {
    // Down-right closure: right and down neighbours inside the triangle must
    // also belong to the set.
    if (i + j <= n_ && (!contains(i + 1, j) || !contains(i, j + 1))) {
      throw std::invalid_argument("set does not have a down-right boundary");
    }
  }
}

DownRightSet DownRightSet::full_triangle(int n) {
  std::vector<std::pair<int, int>> cells;
  cells.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n + 1 - i; ++j) cells.emplace_back(i, j);
  }
  return DownRightSet(n, std::move(cells));
}

bool DownRightSet::contains(int i, int j) const {
  if (i < 1 || j < 1 || i > n_ || j > n_) return false;
  return mask_[static_cast<std::size_t>(i - 1) * n_ + (j - 1)] != 0;
}

namespace {

struct CellIndex {
  explicit CellIndex(const DownRightSet& s) : n(s.n()), pos(static_cast<std::size_t>(n) * n, -1) {
    const auto& cells = s.cells();
    for (std::size_t c = 0; c < cells.size(); ++c) {
      pos[static_cast<std::size_t>(cells[c].first - 1) * n + (cells[c].second - 1)] =
          static_cast<int>(c);
    }
  }
  int at(int i, int j) const {
    return pos[static_cast<std::size_t>(i - 1) * n + (j - 1)];
  }
  int n;
  std::vector<int> pos;
};

void check_array_args(std::span<const double> alphas, const XArrayState& state, int n) {
  check_alphas(alphas);
  if (static_cast<int>(alphas.size()) != n || state.n != n) {
    throw std::invalid_argument("drift vector, state and set sizes must agree");
  }
}

}  // namespace

DriftPotential drift_and_potential(std::span<const double> alphas, const XArrayState& state,
                                   const DownRightSet& s) {
  const int n = s.n();
  check_array_args(alphas, state, n);
  const auto& cells = s.cells();
  const CellIndex idx(s);

  DriftPotential out;
  out.forward.assign(cells.size(), 0.0);
  out.reversed.assign(cells.size(), 0.0);
  out.grad_v.assign(cells.size(), 0.0);

  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [i, j] = cells[c];
    const double xij = state.at(i, j);
    if (i + j == n + 1) {
      const double half_wall = 0.5 * std::exp(-xij);
      out.forward[c] += -alphas[i - 1] + half_wall;
      out.reversed[c] += -alphas[i - 1] + half_wall;
      out.v += 2.0 * alphas[i - 1] * xij + std::exp(-xij);
      out.grad_v[c] += 2.0 * alphas[i - 1] - std::exp(-xij);
      continue;
    }
    const double gamma = alphas[i - 1] + alphas[n - j];
    const double xr = state.at(i, j + 1);
    const double xd = state.at(i + 1, j);
    const double a = std::exp(xr - xij);  // towards the right neighbour
    const double b = std::exp(xd - xij);  // towards the down neighbour
    const double m = std::max(xr, xd);
    const double er = std::exp(xr - m);
    const double ed = std::exp(xd - m);
    const double lse = m + std::log(er + ed);
    const double sig_r = er / (er + ed);
    const double sig_d = ed / (er + ed);

    out.forward[c] += -alphas[n - j] + a;
    out.forward[idx.at(i + 1, j)] += -b + gamma * sig_d;
    out.reversed[c] += -alphas[i - 1] + b;
    out.reversed[idx.at(i, j + 1)] += -a + gamma * sig_r;

    out.v += gamma * xij + a + b - gamma * lse;
    out.grad_v[c] += gamma - a - b;
    out.grad_v[idx.at(i, j + 1)] += a - gamma * sig_r;
    out.grad_v[idx.at(i + 1, j)] += b - gamma * sig_d;
  }

  out.diff.resize(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    out.diff[c] = out.forward[c] - out.reversed[c];
  }
  return out;
}

double divergence_d(std::span<const double> alphas, const XArrayState& state,
                    const DownRightSet& s) {
  const int n = s.n();
  check_array_args(alphas, state, n);

  // d(d_kl)/dx_kl splits over the bonds of the set. The own-cell term of a
  // bulk cell meets the opposite-signed neighbour terms from the cells below
  // and to the right, and the logistic derivatives of the two bonds agree;
  // assembling bond by bond keeps those cancellations exact.
  double div = 0.0;
  for (auto [i, j] : s.cells()) {
    if (i + j > n) continue;  // diagonal cells: d vanishes identically
    const double xij = state.at(i, j);
    const double xr = state.at(i, j + 1);
    const double xd = state.at(i + 1, j);
    const double gamma = alphas[i - 1] + alphas[n - j];
    const double m = std::max(xr, xd);
    const double er = std::exp(xr - m);
    const double ed = std::exp(xd - m);

    const double down_bond = std::exp(xd - xij);     // +own at (i,j), -above part at (i+1,j)
    const double right_bond = std::exp(xr - xij);    // -own at (i,j), +left part at (i,j+1)
    const double logistic = gamma * er * ed / ((er + ed) * (er + ed));
    div += (down_bond - down_bond) + (right_bond - right_bond) + (logistic - logistic);
  }
  return div;
}

std::array<double, 3> dstar_components(std::span<const double> alphas,
                                       const XArrayState& state, int i, int j) {
  const int n = state.n;
  check_alphas(alphas);
  if (static_cast<int>(alphas.size()) != n) {
    throw std::invalid_argument("drift vector and state sizes must agree");
  }
  if (i < 1 || j < 1 || i + j > n) {
    throw std::invalid_argument("vertex must lie strictly above the diagonal");
  }
  const double gamma = alphas[i - 1] + alphas[n - j];
  const double xij = state.at(i, j);
  const double xr = state.at(i, j + 1);
  const double xd = state.at(i + 1, j);
  const double a = std::exp(xr - xij);
  const double b = std::exp(xd - xij);
  const double m = std::max(xr, xd);
  const double er = std::exp(xr - m);
  const double ed = std::exp(xd - m);
  return {alphas[i - 1] - alphas[n - j] + a - b,  // at (i, j)
          a - gamma * er / (er + ed),             // at (i, j+1)
          -b + gamma * ed / (er + ed)};           // at (i+1, j)
}

double vstar(std::span<const double> alphas, const XArrayState& state, int i, int j) {
  const int n = state.n;
  check_alphas(alphas);
  if (static_cast<int>(alphas.size()) != n) {
    throw std::invalid_argument("drift vector and state sizes must agree");
  }
  if (i < 1 || j < 1 || i + j > n) {
    throw std::invalid_argument("vertex must lie strictly above the diagonal");
  }
  const double gamma = alphas[i - 1] + alphas[n - j];
  const double xij = state.at(i, j);
  const double xr = state.at(i, j + 1);
  const double xd = state.at(i + 1, j);
  const double m = std::max(xr, xd);
  const double lse = m + std::log(std::exp(xr - m) + std::exp(xd - m));
  return gamma * xij + std::exp(xd - xij) + std::exp(xr - xij) - gamma * lse;
}

std::array<double, 3> vstar_grad(std::span<const double> alphas, const XArrayState& state,
                                 int i, int j) {
  const int n = state.n;
  check_alphas(alphas);
  if (static_cast<int>(alphas.size()) != n) {
    throw std::invalid_argument("drift vector and state sizes must agree");
  }
  if (i < 1 || j < 1 || i + j > n) {
    throw std::invalid_argument("vertex must lie strictly above the diagonal");
  }
  const double gamma = alphas[i - 1] + alphas[n - j];
  const double xij = state.at(i, j);
  const double xr = state.at(i, j + 1);
  const double xd = state.at(i + 1, j);
  const double a = std::exp(xr - xij);
  const double b = std::exp(xd - xij);
  const double m = std::max(xr, xd);
  const double er = std::exp(xr - m);
  const double ed = std::exp(xd - m);
  return {gamma - a - b,                 // at (i, j)
          a - gamma * er / (er + ed),    // at (i, j+1)
          b - gamma * ed / (er + ed)};   // at (i+1, j)
}

namespace {

// Drift of the chosen dynamics over the full triangle, written into out.
void triangle_drift(std::span<const double> alphas, const XArrayState& st, bool forward,
                    const std::vector<std::pair<int, int>>& cells, const CellIndex& idx,
                    std::vector<double>& out) {
  const int n = st.n;
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto [i, j] = cells[c];
    const double xij = st.at(i, j);
    if (i + j == n + 1) {
      out[c] += -alphas[i - 1] + 0.5 * std::exp(-xij);
      continue;
    }
    const double gamma = alphas[i - 1] + alphas[n - j];
    const double xr = st.at(i, j + 1);
    const double xd = st.at(i + 1, j);
    const double m = std::max(xr, xd);
    const double er = std::exp(xr - m);
    const double ed = std::exp(xd - m);
    if (forward) {
      out[c] += -alphas[n - j] + std::exp(xr - xij);
      out[idx.at(i + 1, j)] += -std::exp(xd - xij) + gamma * ed / (er + ed);
    } else {
      out[c] += -alphas[i - 1] + std::exp(xd - xij);
      out[idx.at(i, j + 1)] += -std::exp(xr - xij) + gamma * er / (er + ed);
    }
  }
}

}  // namespace

XArraySim x_array_simulate(std::span<const double> alphas, XArrayState init, double T,
                           double dt, XDirection direction, std::uint64_t seed,
                           std::uint64_t replica) {
  const int n = init.n;
  check_alphas(alphas);
  if (static_cast<int>(alphas.size()) != n) {
    throw std::invalid_argument("drift vector and state sizes must agree");
  }
  if (!(dt > 0.0) || !(T >= 0.0)) throw std::invalid_argument("need dt > 0 and T >= 0");

  const DownRightSet s = DownRightSet::full_triangle(n);
  const auto& cells = s.cells();
  const CellIndex idx(s);
  std::vector<CounterRng> rngs;
  rngs.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    rngs.emplace_back(seed, StreamTag::path, hash_combine(replica, 0x78617272ULL), c);
  }

  const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
  const double sdt = std::sqrt(dt);
  const bool forward = direction == XDirection::forward;

  XArraySim res{std::move(init), 0.0, false, 0.0};
  std::vector<double> drift(cells.size());
  long tamed = 0;
  long total = 0;
  for (int step = 1; step <= steps; ++step) {
    triangle_drift(alphas, res.state, forward, cells, idx, drift);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto [i, j] = cells[c];
      const double d = drift[c];
      const double tame = 1.0 / (1.0 + dt * std::abs(d));
      if (tame < 0.9) ++tamed;
      ++total;
      double& x = res.state.at(i, j);
      x += d * dt * tame + sdt * rngs[c].gaussian();
      if (std::abs(x) > 1e6) {
        res.blew_up = true;
        res.elapsed = dt * step;
        res.tamed_fraction = total > 0 ? static_cast<double>(tamed) / total : 0.0;
        return res;
      }
    }
    res.elapsed = dt * step;
  }
  res.tamed_fraction = total > 0 ? static_cast<double>(tamed) / total : 0.0;
  return res;
}

}  // namespace flatlpp
