#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace wassval {

// Continuous-time model on an extended state (physical states followed by
// frozen parameter coordinates, whose drift components are identically zero).
// Evaluators take raw pointers so hot loops stay allocation-free.
struct OdeModel {
  // Inverse branch of the output map: preimage returns false when the output
  // point is outside this branch's range; jac_det evaluates |det dh/dx| at a
  // state-space point.
  struct InverseBranch {
    std::function<bool(const double* y, double* x)> preimage;
    std::function<double(const double* x)> jac_det;
  };

  int dim = 0;         // extended-state dimension
  int output_dim = 0;  // 0 means the output map is the identity
  std::function<void(const double* x, double* dx)> drift;
  // Exact trace of the drift Jacobian; leave empty to fall back to central
  // finite differences.
  std::function<double(const double* x)> divergence;
  std::function<void(const double* x, double* y)> output;
  std::vector<InverseBranch> output_branches;
};

// Ito diffusion dx = f(x) dt + g(x) dQ^{1/2} dW with diagonal noise rates.
struct SdeModel {
  int dim = 0;
  int noise_dim = 0;
  std::function<void(const double* x, double* dx)> drift;
  // Writes the dim x noise_dim coupling matrix row-major.
  std::function<void(const double* x, double* g)> diffusion;
  Eigen::VectorXd noise_rates;  // diagonal of Q, all entries > 0
};

// Scalar discrete-time maps. The kind tag lets the transfer-operator code use
// the exact two-branch preimage formulas where they are known instead of the
// generic cell-mapping approximation.
enum class MapKind { kGeneric, kChebyshev, kLogistic };

struct DeterministicMap {
  MapKind kind = MapKind::kGeneric;
  double lo = 0.0, hi = 1.0;  // declared compact domain
  std::function<double(double)> forward;
};

struct MultiplicativeNoiseMap {
  double lo = 0.0, hi = 1.0;
  std::function<double(double)> state_map;  // S(y); next state is zeta * S(y)
  std::function<double(double)> noise_pdf;  // density of zeta
};

struct AdditiveNoiseMap {
  double lo = 0.0, hi = 1.0;
  std::function<double(double)> state_map;  // S(y); next state is S(y) + zeta
  std::function<double(double)> noise_pdf;
};

using MapModel =
    std::variant<DeterministicMap, MultiplicativeNoiseMap, AdditiveNoiseMap>;

// Built-in registry. Identifiers:
//   ODE:  multiwell_oscillator, multiwell_oscillator_linear, cubic_decay,
//         linear_ode
//   SDE:  multiwell_oscillator_sde, multiwell_oscillator_linear_sde,
//         linear_sde
//   map:  chebyshev_map, logistic_map, logistic_multiplicative_noise,
//         identity_additive_noise
// Unknown identifiers throw std::invalid_argument.
OdeModel make_ode_model(const std::string& id);
SdeModel make_sde_model(const std::string& id, double noise_rate = -1.0);
MapModel make_map_model(const std::string& id);
std::vector<std::string> registered_ode_models();
std::vector<std::string> registered_sde_models();
std::vector<std::string> registered_map_models();

// Damped multiwell oscillator  x'' = -a x - b sin(2x) - c x'  with
// a = 0.1, b = 0.5, c = 1: potential U(x) = (a x^2 - b cos 2x)/2, the five
// equilibrium abscissae (roots of a x + b sin 2x), and the three stable foci
// as 2-D points. Roots are solved to 1e-12 at first use.
double multiwell_potential(double x);
std::vector<double> multiwell_equilibrium_abscissae();  // sorted, 5 values
std::vector<Eigen::VectorXd> multiwell_attractors();    // (0,0), (+/-x2*, 0)

// Linearization of the multiwell drift about the origin: [[0,1],[-a-2b,-c]].
Eigen::Matrix2d multiwell_linearization();

}  // namespace wassval
