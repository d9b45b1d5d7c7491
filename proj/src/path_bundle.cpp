#include "flatlpp/path_bundle.hpp"

#include <cmath>
#include <stdexcept>

#include "flatlpp/rng.hpp"

namespace flatlpp {

namespace {
// Auxiliary draws use component keys offset away from the path-noise keys.
constexpr std::uint64_t kBridgeKeyOffset = 0x100000000ULL;
}

PathBundle::PathBundle(int components, double T, double dt, std::uint64_t seed,
                       std::uint64_t replica)
    : components_(components), dt_(dt), seed_(seed), replica_(replica) {
  if (components < 1) throw std::invalid_argument("PathBundle: need a component");
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("PathBundle: bad T or dt");
  steps_ = static_cast<int>(std::ceil(T / dt - 1e-9));
  cum_.resize(static_cast<std::size_t>(components_) * (steps_ + 1));
  const double sd = std::sqrt(dt_);
  for (int m = 0; m < components_; ++m) {
    CounterRng rng(seed_, StreamTag::path, replica_, static_cast<std::uint64_t>(m));
    double w = 0.0;
    cum_[static_cast<std::size_t>(m) * (steps_ + 1)] = 0.0;
    for (int k = 1; k <= steps_; ++k) {
      w += sd * rng.gaussian();
      cum_[static_cast<std::size_t>(m) * (steps_ + 1) + static_cast<std::size_t>(k)] = w;
    }
  }
}

double PathBundle::bridge_uniform(int m, int k) const {
  CounterRng rng(seed_, StreamTag::path,
                 hash_combine(replica_, static_cast<std::uint64_t>(k)),
                 kBridgeKeyOffset + static_cast<std::uint64_t>(m));
  return rng.uniform();
}

double bridge_min(double a, double c, double var, double u) {
  if (!(var > 0.0)) throw std::invalid_argument("bridge_min: variance must be positive");
  const double d = a - c;
  return 0.5 * (a + c - std::sqrt(d * d - 2.0 * var * std::log(u)));
}

double bridge_max(double a, double c, double var, double u) {
  if (!(var > 0.0)) throw std::invalid_argument("bridge_max: variance must be positive");
  const double d = a - c;
  return 0.5 * (a + c + std::sqrt(d * d - 2.0 * var * std::log(u)));
}

}  // namespace flatlpp
