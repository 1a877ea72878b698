#include "wassval/dynamics/liouville.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "wassval/core/parallel.hpp"

namespace wassval {
namespace {

const double kFdStep = std::cbrt(std::numeric_limits<double>::epsilon());

void fd_divergence_check(const OdeModel& model) {
  if (!model.drift) {
    throw std::invalid_argument("propagate_liouville: model has no drift");
  }
}

// Finite-difference drift Jacobian, column by column, into a row-major d x d
// buffer. Scratch must hold 3*d doubles.
void fd_jacobian(const OdeModel& model, const double* x, int d, double* jac,
                 double* scratch) {
  double* xp = scratch;
  double* fp = scratch + d;
  double* fm = scratch + 2 * d;
  for (int j = 0; j < d; ++j) {
    const double h = kFdStep * std::max(1.0, std::abs(x[j]));
    for (int k = 0; k < d; ++k) xp[k] = x[k];
    xp[j] = x[j] + h;
    model.drift(xp, fp);
    xp[j] = x[j] - h;
    model.drift(xp, fm);
    for (int i = 0; i < d; ++i) jac[i * d + j] = (fp[i] - fm[i]) / (2.0 * h);
  }
}

// One particle's augmented state: position, divergence integral, and (when
// tracked) the row-major variational matrix J.
struct AugmentedState {
  std::vector<double> x;
  double s = 0.0;
  std::vector<double> jac;
};

class Rk4Integrator {
 public:
  Rk4Integrator(const OdeModel& model, bool track_jacobian)
      : model_(model),
        d_(model.dim),
        track_(track_jacobian),
        k_(4),
        stage_(),
        dfdx_(track_jacobian ? d_ * d_ : 0),
        scratch_(3 * d_) {
    for (auto& k : k_) {
      k.x.resize(d_);
      if (track_) k.jac.resize(d_ * d_);
    }
    stage_.x.resize(d_);
    if (track_) stage_.jac.resize(d_ * d_);
  }

  // Writes the time derivative of `in` to `out` (reusing out.x as the drift
  // buffer).
  void derivative(const AugmentedState& in, AugmentedState& out) {
    model_.drift(in.x.data(), out.x.data());
    out.s = model_divergence(model_, in.x.data());
    if (track_) {
      fd_jacobian(model_, in.x.data(), d_, dfdx_.data(), scratch_.data());
      for (int i = 0; i < d_; ++i) {
        for (int j = 0; j < d_; ++j) {
          double acc = 0.0;
          for (int k = 0; k < d_; ++k) {
            acc += dfdx_[i * d_ + k] * in.jac[k * d_ + j];
          }
          out.jac[i * d_ + j] = acc;
        }
      }
    }
  }

  void step(AugmentedState& state, double h) {
    derivative(state, k_[0]);
    blend(state, k_[0], 0.5 * h);
    derivative(stage_, k_[1]);
    blend(state, k_[1], 0.5 * h);
    derivative(stage_, k_[2]);
    blend(state, k_[2], h);
    derivative(stage_, k_[3]);
    const double w = h / 6.0;
    for (int i = 0; i < d_; ++i) {
      state.x[i] +=
          w * (k_[0].x[i] + 2.0 * k_[1].x[i] + 2.0 * k_[2].x[i] + k_[3].x[i]);
    }
    state.s += w * (k_[0].s + 2.0 * k_[1].s + 2.0 * k_[2].s + k_[3].s);
    if (track_) {
      for (int i = 0; i < d_ * d_; ++i) {
        state.jac[i] += w * (k_[0].jac[i] + 2.0 * k_[1].jac[i] +
                             2.0 * k_[2].jac[i] + k_[3].jac[i]);
      }
    }
  }

 private:
  void blend(const AugmentedState& base, const AugmentedState& deriv,
             double h) {
    for (int i = 0; i < d_; ++i) stage_.x[i] = base.x[i] + h * deriv.x[i];
    stage_.s = base.s + h * deriv.s;
    if (track_) {
      for (int i = 0; i < d_ * d_; ++i) {
        stage_.jac[i] = base.jac[i] + h * deriv.jac[i];
      }
    }
  }

  const OdeModel& model_;
  int d_;
  bool track_;
  std::vector<AugmentedState> k_;
  AugmentedState stage_;
  std::vector<double> dfdx_;
  std::vector<double> scratch_;
};

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

double model_divergence(const OdeModel& model, const double* x) {
  if (model.divergence) return model.divergence(x);
  const int d = model.dim;
  std::vector<double> xp(x, x + d), fp(d), fm(d);
  double div = 0.0;
  for (int j = 0; j < d; ++j) {
    const double h = kFdStep * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + h;
    model.drift(xp.data(), fp.data());
    xp[j] = x[j] - h;
    model.drift(xp.data(), fm.data());
    xp[j] = x[j];
    div += (fp[j] - fm[j]) / (2.0 * h);
  }
  return div;
}

std::vector<DensitySnapshot> propagate_liouville(
    const OdeModel& model, const ParticleEnsemble& initial_points,
    const std::vector<double>& initial_density,
    const std::vector<double>& t_grid, const LiouvilleOptions& opts) {
  fd_divergence_check(model);
  if (initial_points.dim != model.dim) {
    throw std::invalid_argument(
        "propagate_liouville: ensemble dimension does not match the model");
  }
  const std::int64_t n = initial_points.size();
  if (n < 1) throw std::invalid_argument("propagate_liouville: empty ensemble");
  if (static_cast<std::int64_t>(initial_density.size()) != n) {
    throw std::invalid_argument(
        "propagate_liouville: density values do not match the ensemble");
  }
  if (t_grid.empty()) {
    throw std::invalid_argument("propagate_liouville: empty time grid");
  }
  double prev = 0.0;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0.0 || (k > 0 && t_grid[k] <= prev)) {
      throw std::invalid_argument(
          "propagate_liouville: time grid must be strictly increasing and "
          "nonnegative");
    }
    prev = t_grid[k];
  }
  if (!(opts.dt > 0.0)) {
    throw std::invalid_argument("propagate_liouville: dt must be positive");
  }

  const int d = model.dim;
  const std::size_t n_times = t_grid.size();
  std::vector<DensitySnapshot> out(n_times);
  for (std::size_t k = 0; k < n_times; ++k) {
    out[k].t = t_grid[k];
    out[k].ensemble.dim = d;
    out[k].ensemble.coords.resize(static_cast<std::size_t>(n) * d);
    out[k].ensemble.weights = initial_points.weights;
    out[k].density.resize(n);
    out[k].div_integral.resize(n);
    if (opts.track_jacobian) out[k].jac_det.resize(n);
  }

  const int threads = opts.threads == 0 ? hardware_threads() : opts.threads;
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  parallel_for(n, threads, [&](std::int64_t i) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      Rk4Integrator integrator(model, opts.track_jacobian);
      AugmentedState state;
      state.x.assign(initial_points.point(i).begin(),
                     initial_points.point(i).end());
      if (opts.track_jacobian) {
        state.jac.assign(static_cast<std::size_t>(d) * d, 0.0);
        for (int a = 0; a < d; ++a) state.jac[a * d + a] = 1.0;
      }
      const double xi0 = initial_density[i];
      double t = 0.0;
      for (std::size_t k = 0; k < n_times; ++k) {
        const double span = t_grid[k] - t;
        if (span > 0.0) {
          const auto steps = static_cast<long>(
              std::ceil(span / opts.dt - 1e-12));
          const double h = span / static_cast<double>(steps);
          for (long s = 0; s < steps; ++s) {
            integrator.step(state, h);
            if (!all_finite(state.x) || !std::isfinite(state.s)) {
              throw std::runtime_error(
                  "propagate_liouville: non-finite state for particle " +
                  std::to_string(i) + " near t=" +
                  std::to_string(t + (s + 1) * h));
            }
          }
          t = t_grid[k];
        }
        double* dst = out[k].ensemble.coords.data() +
                      static_cast<std::size_t>(i) * d;
        for (int a = 0; a < d; ++a) dst[a] = state.x[a];
        const double value = xi0 * std::exp(-state.s);
        if (!std::isfinite(value)) {
          throw std::runtime_error(
              "propagate_liouville: non-finite density for particle " +
              std::to_string(i) + " at t=" + std::to_string(t_grid[k]));
        }
        out[k].density[i] = value;
        out[k].div_integral[i] = state.s;
        if (opts.track_jacobian) {
          Eigen::Map<
              const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                  Eigen::RowMajor>>
              jac(state.jac.data(), d, d);
          out[k].jac_det[i] = jac.determinant();
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failed.exchange(true)) failure = e.what();
    }
  });
  if (failed.load()) throw std::runtime_error(failure);
  return out;
}

std::vector<DensitySnapshot> propagate_liouville(
    const OdeModel& model, const DensityFamily& initial, std::int64_t n,
    std::uint64_t seed, SampleScheme scheme, const std::vector<double>& t_grid,
    const LiouvilleOptions& opts) {
  ParticleEnsemble points = sample(initial, n, seed, scheme);
  auto xi0 = make_pdf(initial);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) values[i] = xi0(points.point(i));
  return propagate_liouville(model, points, values, t_grid, opts);
}

ParticleEnsemble push_output(
    const ParticleEnsemble& states, int output_dim,
    const std::function<void(const double* x, double* y)>& h) {
  if (output_dim < 1 || !h) {
    throw std::invalid_argument("push_output: missing output map");
  }
  ParticleEnsemble out;
  out.dim = output_dim;
  out.weights = states.weights;
  out.coords.resize(states.weights.size() * output_dim);
  const std::int64_t n = states.size();
  for (std::int64_t i = 0; i < n; ++i) {
    h(states.point(i).data(), out.coords.data() + i * output_dim);
  }
  return out;
}

ParticleEnsemble push_output(const ParticleEnsemble& states,
                             const OdeModel& model) {
  if (model.output_dim == 0) return states;
  return push_output(states, model.output_dim, model.output);
}

double output_pdf_at(
    const double* y, int state_dim,
    const std::vector<OdeModel::InverseBranch>& branches,
    const std::function<double(const double* x)>& state_density) {
  if (branches.empty()) {
    throw std::invalid_argument("output_pdf_at: no inverse branches declared");
  }
  double total = 0.0;
  std::vector<double> x;
  for (const auto& branch : branches) {
    x.assign(static_cast<std::size_t>(state_dim), 0.0);
    if (!branch.preimage(y, x.data())) continue;
    const double jac = std::abs(branch.jac_det(x.data()));
    if (!(jac > 1e-300)) {
      throw std::runtime_error(
          "output_pdf_at: vanishing Jacobian determinant on a branch");
    }
    total += state_density(x.data()) / jac;
  }
  return total;
}

}  // namespace wassval
