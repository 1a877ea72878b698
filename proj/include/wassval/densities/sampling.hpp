#pragma once

#include <cstdint>

#include "wassval/densities/family.hpp"

namespace wassval {

// pseudo: counter-based substreams of the master seed, one per particle, so a
//         given (seed, i) pair yields the same point regardless of n or
//         thread count.
// halton: deterministic low-discrepancy sequence (first-d-prime bases,
//         starting at index 1), mapped through each marginal inverse CDF;
//         the seed is ignored.
enum class SampleScheme { kPseudo, kHalton };

// Draws an equal-weight ensemble of n points from the family. Empirical
// families cannot be sampled (use their points directly) and throw.
ParticleEnsemble sample(const DensityFamily& family, std::int64_t n,
                        std::uint64_t seed, SampleScheme scheme);

// Van der Corput radical inverse of index in the given base; in (0, 1) for
// index >= 1.
double radical_inverse(std::uint64_t index, std::uint32_t base);

}  // namespace wassval
