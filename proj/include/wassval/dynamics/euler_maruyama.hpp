#pragma once

#include <cstdint>
#include <vector>

#include "wassval/densities/ensemble.hpp"
#include "wassval/densities/family.hpp"
#include "wassval/densities/sampling.hpp"
#include "wassval/dynamics/models.hpp"

namespace wassval {

struct EnsembleSnapshot {
  double t = 0.0;
  ParticleEnsemble ensemble;
};

struct EmOptions {
  double dt = 0.01;
  int threads = 1;  // 0 = hardware_threads()
};

// Euler-Maruyama Monte Carlo: each particle advances by f dt plus a Gaussian
// increment with covariance g Q g^T dt, reported at every time in t_grid
// (strictly increasing, nonnegative). Noise streams are derived per particle
// from the seed at substream index 2^63 + i, disjoint from the sampling
// substreams, so results are independent of particle order and thread count.
// dt must not exceed the smallest grid spacing. Zero diffusion reduces to
// deterministic Euler trajectories of the drift. Throws std::runtime_error on
// a non-finite state, naming the particle and time.
std::vector<EnsembleSnapshot> propagate_em(const SdeModel& model,
                                           const ParticleEnsemble& initial,
                                           const std::vector<double>& t_grid,
                                           std::uint64_t seed,
                                           const EmOptions& opts = {});

// Convenience: samples n points from the family with the same seed first.
std::vector<EnsembleSnapshot> propagate_em(const SdeModel& model,
                                           const DensityFamily& initial,
                                           std::int64_t n,
                                           const std::vector<double>& t_grid,
                                           std::uint64_t seed,
                                           SampleScheme scheme = SampleScheme::kPseudo,
                                           const EmOptions& opts = {});

}  // namespace wassval
