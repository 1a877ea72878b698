#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wassval {

// Weighted point cloud in R^d, stored row-major. Weights are a probability
// vector: construction helpers renormalize drifts beyond 1e-12 (logged at
// debug level) and reject negative, non-finite, or all-zero weights.
struct ParticleEnsemble {
  int dim = 0;
  std::vector<double> coords;   // size n*dim
  std::vector<double> weights;  // size n

  std::int64_t size() const {
    return static_cast<std::int64_t>(weights.size());
  }
  std::span<const double> point(std::int64_t i) const {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> point_mut(std::int64_t i) {
    return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

// Validates invariants and renormalizes the weight vector if its sum drifted
// from 1 by more than 1e-12. Throws on negative/non-finite weights, zero total
// mass, or a coords/weights size mismatch.
void normalize_weights(ParticleEnsemble& ensemble);

// Equal-weight ensemble with the given coordinates.
ParticleEnsemble ensemble_from_points(int dim, std::vector<double> coords);

// CSV round trip. Header is `w,x1,...,xd`; the weight column may be omitted
// on read (uniform weights assumed) and is always written.
ParticleEnsemble read_ensemble_csv(const std::string& path);
void write_ensemble_csv(const std::string& path,
                        const ParticleEnsemble& ensemble);

}  // namespace wassval
