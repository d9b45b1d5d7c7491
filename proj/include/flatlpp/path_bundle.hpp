// Bundles of driftless Brownian paths on a uniform grid, with deterministic
// per-(component, step) substreams for auxiliary draws and exact samplers
// for the minimum / maximum of a Brownian bridge across one step.
#pragma once

#include <cstdint>
#include <vector>

namespace flatlpp {

class PathBundle {
 public:
  // components standard Brownian motions on [0, T], steps of size dt.
  PathBundle(int components, double T, double dt, std::uint64_t seed,
             std::uint64_t replica);

  int components() const { return components_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double time(int k) const { return dt_ * k; }
  // W_m(t_k), driftless, W_m(0) = 0.
  double cum(int m, int k) const {
    return cum_[static_cast<std::size_t>(m) * (steps_ + 1) + static_cast<std::size_t>(k)];
  }
  // Uniform tied to (component, step), independent of the path draws; the
  // same (seed, replica, m, k) always yields the same value.
  double bridge_uniform(int m, int k) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

 private:
  int components_;
  int steps_;
  double dt_;
  std::uint64_t seed_, replica_;
  std::vector<double> cum_;
};

// Exact minimum / maximum over one step of a Brownian bridge from a to c
// with endpoint variance var = sigma^2 dt, driven by a uniform u in (0, 1).
double bridge_min(double a, double c, double var, double u);
double bridge_max(double a, double c, double var, double u);

}  // namespace flatlpp
