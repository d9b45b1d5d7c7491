// Counter-based random number generation (Philox4x32-10).
//
// Every consumer derives an independent substream from a 64-bit master seed
// plus a stream key, so replica r / lattice cell (i,j) draws are reproducible
// regardless of evaluation order.
#pragma once

#include <cstdint>
#include <array>
#include <string_view>

namespace flatlpp {

// One 128-bit Philox4x32-10 block: counter (4x32) encrypted under key (2x32).
std::array<std::uint32_t, 4> philox4x32(const std::array<std::uint32_t, 4>& ctr,
                                        const std::array<std::uint32_t, 2>& key);

// Stable 64-bit mix used to derive stream identifiers from structured keys.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

// Named substream tags; keep values stable, they are part of reproducibility.
enum class StreamTag : std::uint64_t {
  cell = 1,          // per lattice cell (i,j)
  replica = 2,       // per Monte Carlo replica
  permutation = 3,   // permutation tests
  path = 4,          // Brownian path bundles
  scratch = 5,       // miscellaneous single-use draws
};

class CounterRng {
 public:
  CounterRng(std::uint64_t master_seed, std::uint64_t stream);
  CounterRng(std::uint64_t master_seed, StreamTag tag, std::uint64_t a,
             std::uint64_t b = 0);

  std::uint64_t next_u64();
  // Uniform on (0,1); never returns 0 or 1.
  double uniform();
  // Standard normal via Box-Muller (pairs cached).
  double gaussian();
  // Exponential with the given rate.
  double exponential(double rate);
  // Gamma(shape, unit rate) via Marsaglia-Tsang, shape > 0.
  double gamma(double shape);
  // Inverse gamma with density w^(-shape-1) e^(-1/w) / Gamma(shape).
  double inverse_gamma(double shape);

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t master_seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 2> key_;
  bool have_cached_gauss_ = false;
  double cached_gauss_ = 0.0;
};

}  // namespace flatlpp
