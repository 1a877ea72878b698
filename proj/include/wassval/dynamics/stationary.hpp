#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "wassval/densities/family.hpp"
#include "wassval/densities/sampling.hpp"
#include "wassval/dynamics/models.hpp"

namespace wassval {

// Solves A X + X A^T + W = 0 for symmetric X via the Kronecker-vectorized
// linear system; checks A is Hurwitz first and that the residual Frobenius
// norm is at most 1e-10 relative to the data scale. Throws otherwise.
Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a,
                                          const Eigen::MatrixXd& w);

// Stationary density of dx = A x dt + B dbeta with E[dbeta dbeta^T] = Q dt:
// Gaussian(0, S) with A S + S A^T + B Q B^T = 0. Requires A Hurwitz; the
// controllability of (A, B) is the caller's responsibility (a semidefinite S
// is returned as-is).
DensityFamily stationary_linear_sde(const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& b,
                                    const Eigen::MatrixXd& q);

// Uniform 2-D node grid (endpoints included) with trapezoidal normalization.
struct DensityGrid2D {
  double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
  int nx = 0, ny = 0;
  std::vector<double> values;  // values[iy * nx + ix]

  double x_node(int ix) const { return x_lo + ix * (x_hi - x_lo) / (nx - 1); }
  double y_node(int iy) const { return y_lo + iy * (y_hi - y_lo) / (ny - 1); }
  double& at(int ix, int iy) { return values[iy * nx + ix]; }
  double at(int ix, int iy) const { return values[iy * nx + ix]; }
  double integral() const;  // trapezoidal
};

// Gibbs density proportional to exp(-(c/Q) (U(x1) + x2^2/2)), normalized on
// the grid. This is the invariant law of the damped noisy oscillator
//   dx1 = x2 dt,  dx2 = (-U'(x1) - c x2) dt + dbeta
// when E[dbeta^2] = 2Q dt; for an SdeModel whose noise variance rate is
// alpha (E[dbeta^2] = alpha dt, the convention used by propagate_em and
// stationary_linear_sde), pass Q = alpha/2. Throws if the normalization
// constant is zero, non-finite, or the grid carries essentially no mass.
DensityGrid2D stationary_hamiltonian(const std::function<double(double)>& u,
                                     double c, double q, double x_lo,
                                     double x_hi, double y_lo, double y_hi,
                                     int nx, int ny);

struct DiracStationaryResult {
  DensityFamily density;      // DiracMixture over the attractor points
  std::int64_t unclassified;  // samples not assigned to any attractor
};

struct DiracStationaryOptions {
  double dt = 0.01;
  double horizon = 100.0;      // integrate this long before giving up
  double snap_radius = 1e-3;   // accept the nearest attractor within this
  double early_exit = 1e-4;    // stop as soon as a trajectory is this deep
  int threads = 1;
};

// Long-run density of a multistable ODE: a Dirac mixture over the attractors
// with masses equal to the initial-probability mass of each basin, estimated
// by classifying n samples of xi0. classifier may be empty, in which case
// each sample is integrated (RK4) up to the horizon and snapped to the
// nearest attractor within snap_radius; unconverged trajectories are counted
// in `unclassified` (their mass is left out rather than guessed, so atom
// masses sum to the classified fraction).
DiracStationaryResult dirac_stationary(
    const OdeModel& model, const DensityFamily& xi0,
    const std::vector<Eigen::VectorXd>& attractors,
    const std::function<int(const Eigen::VectorXd&)>& classifier,
    std::int64_t n, std::uint64_t seed,
    SampleScheme scheme = SampleScheme::kHalton,
    const DiracStationaryOptions& opts = {});

enum class MomentMode { kContinuous, kDiscrete };

struct MomentSnapshot {
  double t = 0.0;
  Eigen::VectorXd mean_x;
  Eigen::MatrixXd cov_x;
  Eigen::VectorXd mean_y;
  Eigen::MatrixXd cov_y;
};

// First and second moments of a linear Gaussian system with output y = C x.
// Continuous mode integrates d(mu)/dt = A mu and dS/dt = A S + S A^T + BQB^T
// with RK4 (step dt) and reports at each time in t_grid; discrete mode
// iterates mu <- A mu, S <- A S A^T + B Q B^T and interprets t_grid as
// nonnegative integer step counts.
std::vector<MomentSnapshot> linear_gaussian_moments(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
    const Eigen::MatrixXd& c, const Eigen::MatrixXd& q,
    const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0,
    const std::vector<double>& t_grid, MomentMode mode, double dt = 0.01);

}  // namespace wassval
