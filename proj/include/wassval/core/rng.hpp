#pragma once

#include <cstdint>

namespace wassval {

// Deterministic, platform-independent RNG: xoshiro256** seeded through
// splitmix64. Used instead of <random> engines+distributions because the
// reproducibility contract ("identical seeds yield bit-identical ensembles")
// must hold across standard libraries, and because per-particle substreams
// need cheap independent derivation from (seed, index).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from this stream's seed and an index.
  // Pure function of (seed, index): parallel callers at different indices
  // see the same values regardless of scheduling.
  Rng substream(std::uint64_t index) const;

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1, so inverse-CDF
  // transforms stay finite.
  double next_open01();

  // Uniform on [lo, hi).
  double next_uniform(double lo, double hi);

  // Standard normal via inverse CDF (no cached spare: a pure stream).
  double next_normal();

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
};

}  // namespace wassval
