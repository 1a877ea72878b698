#include "wassval/dynamics/models.hpp"

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "wassval/core/numerics.hpp"

namespace wassval {
namespace {

constexpr double kA = 0.1, kB = 0.5, kC = 1.0;

void multiwell_drift(const double* x, double* dx) {
  dx[0] = x[1];
  dx[1] = -kA * x[0] - kB * std::sin(2.0 * x[0]) - kC * x[1];
}

void multiwell_linear_drift(const double* x, double* dx) {
  dx[0] = x[1];
  dx[1] = -(kA + 2.0 * kB) * x[0] - kC * x[1];
}

// Root of a*x + b*sin(2x) in a bracket where the function changes sign.
double solve_equilibrium(double lo, double hi) {
  auto f = [](double x) { return kA * x + kB * std::sin(2.0 * x); };
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0 || hi - lo < 1e-14) return mid;
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

const std::vector<double>& equilibria() {
  static std::vector<double> roots;
  static std::once_flag flag;
  std::call_once(flag, [] {
    // f(x) = 0.1 x + 0.5 sin 2x has roots at 0 and two positive ones: the
    // saddle abscissa in (1, 2) and the focus abscissa in (2.5, pi).
    double saddle = solve_equilibrium(1.0, 2.0);
    double focus = solve_equilibrium(2.5, 3.14159);
    roots = {-focus, -saddle, 0.0, saddle, focus};
  });
  return roots;
}

}  // namespace

double multiwell_potential(double x) {
  return 0.5 * (kA * x * x - kB * std::cos(2.0 * x));
}

std::vector<double> multiwell_equilibrium_abscissae() { return equilibria(); }

std::vector<Eigen::VectorXd> multiwell_attractors() {
  const auto& roots = equilibria();
  std::vector<Eigen::VectorXd> pts;
  for (double r : {roots[2], roots[4], roots[0]}) {
    Eigen::VectorXd p(2);
    p << r, 0.0;
    pts.push_back(p);
  }
  return pts;
}

Eigen::Matrix2d multiwell_linearization() {
  Eigen::Matrix2d a;
  a << 0.0, 1.0, -(kA + 2.0 * kB), -kC;
  return a;
}

OdeModel make_ode_model(const std::string& id) {
  OdeModel m;
  if (id == "multiwell_oscillator") {
    m.dim = 2;
    m.drift = multiwell_drift;
    m.divergence = [](const double*) { return -kC; };
    return m;
  }
  if (id == "multiwell_oscillator_linear") {
    m.dim = 2;
    m.drift = multiwell_linear_drift;
    m.divergence = [](const double*) { return -kC; };
    return m;
  }
  if (id == "cubic_decay") {
    // Extended state (x, p), parameter frozen: dx = -p x^3, dp = 0.
    m.dim = 2;
    m.drift = [](const double* x, double* dx) {
      dx[0] = -x[1] * x[0] * x[0] * x[0];
      dx[1] = 0.0;
    };
    m.divergence = [](const double* x) { return -3.0 * x[1] * x[0] * x[0]; };
    m.output_dim = 1;
    m.output = [](const double* x, double* y) { y[0] = x[0]; };
    return m;
  }
  if (id == "linear_ode") {
    m.dim = 1;
    m.drift = [](const double* x, double* dx) { dx[0] = -x[0]; };
    m.divergence = [](const double*) { return -1.0; };
    return m;
  }
  throw std::invalid_argument("make_ode_model: unknown model id '" + id + "'");
}

SdeModel make_sde_model(const std::string& id, double noise_rate) {
  SdeModel m;
  auto unit_column = [](const double*, double* g) {
    g[0] = 0.0;
    g[1] = 1.0;
  };
  if (id == "multiwell_oscillator_sde" ||
      id == "multiwell_oscillator_linear_sde") {
    m.dim = 2;
    m.noise_dim = 1;
    m.drift = id == "multiwell_oscillator_sde" ? multiwell_drift
                                               : multiwell_linear_drift;
    m.diffusion = unit_column;
    m.noise_rates = Eigen::VectorXd::Constant(1, noise_rate > 0.0 ? noise_rate
                                                                  : 0.2);
    return m;
  }
  if (id == "linear_sde") {
    m.dim = 1;
    m.noise_dim = 1;
    m.drift = [](const double* x, double* dx) { dx[0] = -x[0]; };
    m.diffusion = [](const double*, double* g) { g[0] = 1.0; };
    m.noise_rates =
        Eigen::VectorXd::Constant(1, noise_rate > 0.0 ? noise_rate : 1.0);
    return m;
  }
  throw std::invalid_argument("make_sde_model: unknown model id '" + id + "'");
}

MapModel make_map_model(const std::string& id) {
  if (id == "chebyshev_map") {
    DeterministicMap m;
    m.kind = MapKind::kChebyshev;
    m.lo = -1.0;
    m.hi = 1.0;
    m.forward = [](double x) { return std::cos(2.0 * std::acos(x)); };
    return m;
  }
  if (id == "logistic_map") {
    DeterministicMap m;
    m.kind = MapKind::kLogistic;
    m.lo = 0.0;
    m.hi = 1.0;
    m.forward = [](double x) { return 4.0 * x * (1.0 - x); };
    return m;
  }
  if (id == "logistic_multiplicative_noise") {
    MultiplicativeNoiseMap m;
    m.lo = 0.0;
    m.hi = 1.0;
    m.state_map = [](double y) { return y * (1.0 - y); };
    // Standard normal restricted to the noise support [0, 4]; kept
    // unnormalized to match the closed-form kernel it is checked against.
    m.noise_pdf = [](double z) {
      return (z >= 0.0 && z <= 4.0) ? num::normal_pdf(z) : 0.0;
    };
    return m;
  }
  if (id == "identity_additive_noise") {
    AdditiveNoiseMap m;
    m.lo = -8.0;
    m.hi = 8.0;
    m.state_map = [](double y) { return y; };
    m.noise_pdf = [](double z) { return num::normal_pdf(z); };
    return m;
  }
  throw std::invalid_argument("make_map_model: unknown model id '" + id + "'");
}

std::vector<std::string> registered_ode_models() {
  return {"multiwell_oscillator", "multiwell_oscillator_linear", "cubic_decay",
          "linear_ode"};
}

std::vector<std::string> registered_sde_models() {
  return {"multiwell_oscillator_sde", "multiwell_oscillator_linear_sde",
          "linear_sde"};
}

std::vector<std::string> registered_map_models() {
  return {"chebyshev_map", "logistic_map", "logistic_multiplicative_noise",
          "identity_additive_noise"};
}

}  // namespace wassval
