#include "wassval/dynamics/stationary.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "wassval/core/parallel.hpp"

namespace wassval {
namespace {

void require_hurwitz(const Eigen::MatrixXd& a, const char* who) {
  Eigen::EigenSolver<Eigen::MatrixXd> eig(a);
  const double max_real = eig.eigenvalues().real().maxCoeff();
  if (!(max_real < 0.0)) {
    throw std::invalid_argument(std::string(who) +
                                ": matrix is not Hurwitz (max Re lambda = " +
                                std::to_string(max_real) + ")");
  }
}

// Plain RK4 step of dx/dt = f(x) for small dense vectors.
template <typename F>
Eigen::VectorXd rk4_step(const F& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd k1 = f(x);
  Eigen::VectorXd k2 = f(x + 0.5 * h * k1);
  Eigen::VectorXd k3 = f(x + 0.5 * h * k2);
  Eigen::VectorXd k4 = f(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Eigen::MatrixXd solve_continuous_lyapunov(const Eigen::MatrixXd& a,
                                          const Eigen::MatrixXd& w) {
  const auto d = a.rows();
  if (a.cols() != d || w.rows() != d || w.cols() != d) {
    throw std::invalid_argument("solve_continuous_lyapunov: dimension mismatch");
  }
  require_hurwitz(a, "solve_continuous_lyapunov");
  // vec(AX + XA^T) = (I kron A + A kron I) vec(X)
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd op(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      op.block(i * d, j * d, d, d) = eye(i, j) * a;          // I kron A
      op.block(i * d, j * d, d, d) += a(i, j) * eye;         // A kron I
    }
  }
  Eigen::VectorXd rhs(d * d);
  for (Eigen::Index j = 0; j < d; ++j) rhs.segment(j * d, d) = -w.col(j);
  const Eigen::VectorXd vec_x = op.partialPivLu().solve(rhs);
  Eigen::MatrixXd x(d, d);
  for (Eigen::Index j = 0; j < d; ++j) x.col(j) = vec_x.segment(j * d, d);
  x = 0.5 * (x + x.transpose()).eval();
  const double scale =
      std::max({1.0, a.norm() * x.norm(), w.norm()});
  const double residual = (a * x + x * a.transpose() + w).norm();
  if (!(residual <= 1e-10 * scale)) {
    throw std::runtime_error(
        "solve_continuous_lyapunov: residual " + std::to_string(residual) +
        " exceeds tolerance");
  }
  return x;
}

DensityFamily stationary_linear_sde(const Eigen::MatrixXd& a,
                                    const Eigen::MatrixXd& b,
                                    const Eigen::MatrixXd& q) {
  if (b.rows() != a.rows() || q.rows() != b.cols() || q.cols() != b.cols()) {
    throw std::invalid_argument("stationary_linear_sde: dimension mismatch");
  }
  const Eigen::MatrixXd w = b * q * b.transpose();
  Eigen::MatrixXd sigma = solve_continuous_lyapunov(a, w);
  Gaussian g;
  g.mean = Eigen::VectorXd::Zero(a.rows());
  g.cov = std::move(sigma);
  return g;
}

double DensityGrid2D::integral() const {
  const double hx = (x_hi - x_lo) / (nx - 1);
  const double hy = (y_hi - y_lo) / (ny - 1);
  double acc = 0.0;
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double w = 1.0;
      if (ix == 0 || ix == nx - 1) w *= 0.5;
      if (iy == 0 || iy == ny - 1) w *= 0.5;
      acc += w * at(ix, iy);
    }
  }
  return acc * hx * hy;
}

DensityGrid2D stationary_hamiltonian(const std::function<double(double)>& u,
                                     double c, double q, double x_lo,
                                     double x_hi, double y_lo, double y_hi,
                                     int nx, int ny) {
  if (!(c > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument(
        "stationary_hamiltonian: damping and noise strength must be positive");
  }
  if (nx < 2 || ny < 2 || !(x_hi > x_lo) || !(y_hi > y_lo)) {
    throw std::invalid_argument("stationary_hamiltonian: bad grid");
  }
  DensityGrid2D grid;
  grid.x_lo = x_lo;
  grid.x_hi = x_hi;
  grid.y_lo = y_lo;
  grid.y_hi = y_hi;
  grid.nx = nx;
  grid.ny = ny;
  grid.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  const double beta = c / q;
  // Shift the exponent by the minimum energy on the grid so the exponentials
  // stay in range regardless of the potential's offset.
  double min_energy = std::numeric_limits<double>::infinity();
  std::vector<double> ux(nx);
  for (int ix = 0; ix < nx; ++ix) {
    ux[ix] = u(grid.x_node(ix));
    if (!std::isfinite(ux[ix])) {
      throw std::runtime_error(
          "stationary_hamiltonian: potential non-finite on the grid");
    }
    min_energy = std::min(min_energy, ux[ix]);
  }
  for (int iy = 0; iy < ny; ++iy) {
    const double y = grid.y_node(iy);
    for (int ix = 0; ix < nx; ++ix) {
      grid.at(ix, iy) =
          std::exp(-beta * (ux[ix] + 0.5 * y * y - min_energy));
    }
  }
  const double total = grid.integral();
  if (!(total > 1e-300) || !std::isfinite(total)) {
    throw std::runtime_error(
        "stationary_hamiltonian: normalization constant degenerate on this "
        "grid");
  }
  for (double& v : grid.values) v /= total;
  return grid;
}

DiracStationaryResult dirac_stationary(
    const OdeModel& model, const DensityFamily& xi0,
    const std::vector<Eigen::VectorXd>& attractors,
    const std::function<int(const Eigen::VectorXd&)>& classifier,
    std::int64_t n, std::uint64_t seed, SampleScheme scheme,
    const DiracStationaryOptions& opts) {
  if (attractors.empty()) {
    throw std::invalid_argument("dirac_stationary: no attractors given");
  }
  const int d = model.dim;
  for (const auto& p : attractors) {
    if (p.size() != d) {
      throw std::invalid_argument(
          "dirac_stationary: attractor dimension mismatch");
    }
  }
  ParticleEnsemble samples = sample(xi0, n, seed, scheme);
  if (samples.dim != d) {
    throw std::invalid_argument(
        "dirac_stationary: initial density dimension does not match model");
  }

  auto nearest_within = [&](const Eigen::VectorXd& x, double radius) -> int {
    int best = -1;
    double best_dist = radius;
    for (std::size_t a = 0; a < attractors.size(); ++a) {
      const double dist = (x - attractors[a]).norm();
      if (dist <= best_dist) {
        best_dist = dist;
        best = static_cast<int>(a);
      }
    }
    return best;
  };

  std::vector<int> label(static_cast<std::size_t>(n), -1);
  const int threads = opts.threads == 0 ? hardware_threads() : opts.threads;
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  parallel_for(n, threads, [&](std::int64_t i) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      Eigen::VectorXd x =
          Eigen::Map<const Eigen::VectorXd>(samples.point(i).data(), d);
      if (classifier) {
        label[i] = classifier(x);
        return;
      }
      auto drift = [&model, d](const Eigen::VectorXd& state) {
        Eigen::VectorXd dx(d);
        model.drift(state.data(), dx.data());
        return dx;
      };
      const auto steps =
          static_cast<long>(std::ceil(opts.horizon / opts.dt - 1e-12));
      const double h = opts.horizon / static_cast<double>(steps);
      // Check for early commitment only every few steps; the test is O(#
      // attractors) and the trajectory cannot leave a basin once inside.
      constexpr long kCheckEvery = 25;
      for (long s = 0; s < steps; ++s) {
        x = rk4_step(drift, x, h);
        if (!x.allFinite()) {
          throw std::runtime_error(
              "dirac_stationary: non-finite state for sample " +
              std::to_string(i));
        }
        if (s % kCheckEvery == kCheckEvery - 1) {
          const int hit = nearest_within(x, opts.early_exit);
          if (hit >= 0) {
            label[i] = hit;
            return;
          }
        }
      }
      label[i] = nearest_within(x, opts.snap_radius);
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failed.exchange(true)) failure = e.what();
    }
  });
  if (failed.load()) throw std::runtime_error(failure);

  std::vector<double> mass(attractors.size(), 0.0);
  std::int64_t unclassified = 0;
  for (std::int64_t i = 0; i < n; ++i) {
    const int a = label[i];
    if (a < 0 || a >= static_cast<int>(attractors.size())) {
      ++unclassified;
    } else {
      mass[a] += samples.weights[i];
    }
  }

  DiracMixture mixture;
  mixture.atoms.dim = d;
  for (std::size_t a = 0; a < attractors.size(); ++a) {
    mixture.atoms.coords.insert(mixture.atoms.coords.end(),
                                attractors[a].data(),
                                attractors[a].data() + d);
    mixture.atoms.weights.push_back(mass[a]);
  }
  return {DensityFamily{std::move(mixture)}, unclassified};
}

std::vector<MomentSnapshot> linear_gaussian_moments(
    const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
    const Eigen::MatrixXd& c, const Eigen::MatrixXd& q,
    const Eigen::VectorXd& mu0, const Eigen::MatrixXd& sigma0,
    const std::vector<double>& t_grid, MomentMode mode, double dt) {
  const auto d = a.rows();
  if (a.cols() != d || mu0.size() != d || sigma0.rows() != d ||
      sigma0.cols() != d || b.rows() != d || c.cols() != d ||
      q.rows() != b.cols() || q.cols() != b.cols()) {
    throw std::invalid_argument("linear_gaussian_moments: dimension mismatch");
  }
  if (t_grid.empty()) {
    throw std::invalid_argument("linear_gaussian_moments: empty time grid");
  }
  const Eigen::MatrixXd w = b * q * b.transpose();
  Eigen::VectorXd mu = mu0;
  Eigen::MatrixXd sigma = sigma0;
  std::vector<MomentSnapshot> out;
  out.reserve(t_grid.size());
  auto report = [&](double t) {
    MomentSnapshot snap;
    snap.t = t;
    snap.mean_x = mu;
    snap.cov_x = sigma;
    snap.mean_y = c * mu;
    snap.cov_y = c * sigma * c.transpose();
    out.push_back(std::move(snap));
  };

  if (mode == MomentMode::kDiscrete) {
    double prev = -1.0;
    long step = 0;
    for (double t : t_grid) {
      const auto target = static_cast<long>(std::llround(t));
      if (std::abs(t - target) > 1e-9 || target < 0 || t <= prev) {
        throw std::invalid_argument(
            "linear_gaussian_moments: discrete grid must be increasing "
            "nonnegative integers");
      }
      for (; step < target; ++step) {
        mu = a * mu;
        sigma = (a * sigma * a.transpose() + w).eval();
      }
      report(t);
      prev = t;
    }
    return out;
  }

  if (!(dt > 0.0)) {
    throw std::invalid_argument("linear_gaussian_moments: dt must be positive");
  }
  double t_now = 0.0;
  for (double t : t_grid) {
    if (t < 0.0 || (!out.empty() && t <= t_now)) {
      throw std::invalid_argument(
          "linear_gaussian_moments: time grid must be strictly increasing and "
          "nonnegative");
    }
    const double span = t - t_now;
    if (span > 0.0) {
      const auto steps = static_cast<long>(std::ceil(span / dt - 1e-12));
      const double h = span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        // Joint RK4 on (mu, Sigma); Sigma flattened column-major.
        const Eigen::VectorXd mu_in = mu;
        const Eigen::MatrixXd sig_in = sigma;
        auto f_mu = [&a](const Eigen::VectorXd& m) -> Eigen::VectorXd {
          return a * m;
        };
        auto f_sig = [&a, &w](const Eigen::MatrixXd& s_) -> Eigen::MatrixXd {
          return a * s_ + s_ * a.transpose() + w;
        };
        const Eigen::VectorXd k1m = f_mu(mu_in);
        const Eigen::MatrixXd k1s = f_sig(sig_in);
        const Eigen::VectorXd k2m = f_mu(mu_in + 0.5 * h * k1m);
        const Eigen::MatrixXd k2s = f_sig(sig_in + 0.5 * h * k1s);
        const Eigen::VectorXd k3m = f_mu(mu_in + 0.5 * h * k2m);
        const Eigen::MatrixXd k3s = f_sig(sig_in + 0.5 * h * k2s);
        const Eigen::VectorXd k4m = f_mu(mu_in + h * k3m);
        const Eigen::MatrixXd k4s = f_sig(sig_in + h * k3s);
        mu = mu_in + (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        sigma = sig_in + (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
      }
      t_now = t;
    }
    report(t);
  }
  return out;
}

}  // namespace wassval
