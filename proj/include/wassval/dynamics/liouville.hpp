#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wassval/densities/ensemble.hpp"
#include "wassval/densities/family.hpp"
#include "wassval/densities/sampling.hpp"
#include "wassval/dynamics/models.hpp"

namespace wassval {

struct LiouvilleOptions {
  double dt = 0.01;  // fixed RK4 step; the divergence integral shares the grid
  // Also integrate dJ/dt = Df(x) J (finite-difference Jacobian) and report
  // det J per particle; an independent consistency check against the
  // divergence integral, since det J = exp(+integral of div f) exactly.
  bool track_jacobian = false;
  int threads = 1;  // 0 = hardware_threads()
};

// State of the method-of-characteristics ensemble at one report time: particle
// positions with their (untouched) sampling weights, the transported density
// value xi0(x0) * exp(-div integral) at each particle, the accumulated
// divergence integral, and det J when tracked.
struct DensitySnapshot {
  double t = 0.0;
  ParticleEnsemble ensemble;
  std::vector<double> density;
  std::vector<double> div_integral;
  std::vector<double> jac_det;  // empty unless track_jacobian
};

// Divergence of the model drift at x: the model's analytic evaluator when
// present, otherwise central differences with per-axis step
// cbrt(machine eps) * max(1, |x_i|).
double model_divergence(const OdeModel& model, const double* x);

// Transports an initial density along drift characteristics: each particle
// follows dx/dt = f(x) under classical RK4 while accumulating the divergence
// integral, and its density value is reported at every time in t_grid
// (strictly increasing, nonnegative; a leading 0 reports the initial state).
// Weights are carried unchanged, so the weighted total mass is conserved
// exactly. Throws std::runtime_error naming the particle and time if a state
// or density goes non-finite.
std::vector<DensitySnapshot> propagate_liouville(
    const OdeModel& model, const ParticleEnsemble& initial_points,
    const std::vector<double>& initial_density,
    const std::vector<double>& t_grid, const LiouvilleOptions& opts = {});

// Convenience: samples n points from the family (which must have a density)
// and evaluates xi0 at them.
std::vector<DensitySnapshot> propagate_liouville(
    const OdeModel& model, const DensityFamily& initial, std::int64_t n,
    std::uint64_t seed, SampleScheme scheme, const std::vector<double>& t_grid,
    const LiouvilleOptions& opts = {});

// Maps particle positions through an output function, carrying weights.
ParticleEnsemble push_output(
    const ParticleEnsemble& states, int output_dim,
    const std::function<void(const double* x, double* y)>& h);
// Uses the model's output map; identity (a copy) when none is declared.
ParticleEnsemble push_output(const ParticleEnsemble& states,
                             const OdeModel& model);

// Output-space density at a single output point: sum over declared inverse
// branches of state_density(x_j*) / |det J(x_j*)|. Throws on a vanishing
// Jacobian determinant.
double output_pdf_at(
    const double* y, int state_dim,
    const std::vector<OdeModel::InverseBranch>& branches,
    const std::function<double(const double* x)>& state_density);

}  // namespace wassval
