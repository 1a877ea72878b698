#include "wassval/dynamics/euler_maruyama.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>

#include "wassval/core/parallel.hpp"
#include "wassval/core/rng.hpp"

namespace wassval {

std::vector<EnsembleSnapshot> propagate_em(const SdeModel& model,
                                           const ParticleEnsemble& initial,
                                           const std::vector<double>& t_grid,
                                           std::uint64_t seed,
                                           const EmOptions& opts) {
  if (!model.drift || !model.diffusion) {
    throw std::invalid_argument("propagate_em: model is missing evaluators");
  }
  if (model.noise_rates.size() != model.noise_dim ||
      (model.noise_rates.array() <= 0.0).any()) {
    throw std::invalid_argument(
        "propagate_em: noise rates must be positive, one per noise channel");
  }
  if (initial.dim != model.dim) {
    throw std::invalid_argument(
        "propagate_em: ensemble dimension does not match the model");
  }
  if (t_grid.empty()) {
    throw std::invalid_argument("propagate_em: empty time grid");
  }
  double prev = 0.0;
  double min_span = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0.0 || (k > 0 && t_grid[k] <= prev)) {
      throw std::invalid_argument(
          "propagate_em: time grid must be strictly increasing and "
          "nonnegative");
    }
    const double span = t_grid[k] - prev;
    if (span > 0.0) min_span = std::min(min_span, span);
    prev = t_grid[k];
  }
  if (!(opts.dt > 0.0) || opts.dt > min_span + 1e-12) {
    throw std::invalid_argument(
        "propagate_em: dt must be positive and at most the smallest grid "
        "spacing");
  }

  const int d = model.dim;
  const int w = model.noise_dim;
  const std::int64_t n = initial.size();
  const std::size_t n_times = t_grid.size();
  std::vector<EnsembleSnapshot> out(n_times);
  for (std::size_t k = 0; k < n_times; ++k) {
    out[k].t = t_grid[k];
    out[k].ensemble.dim = d;
    out[k].ensemble.coords.resize(static_cast<std::size_t>(n) * d);
    out[k].ensemble.weights = initial.weights;
  }

  const Rng master(seed);
  const int threads = opts.threads == 0 ? hardware_threads() : opts.threads;
  std::atomic<bool> failed{false};
  std::string failure;
  std::mutex failure_mutex;

  parallel_for(n, threads, [&](std::int64_t i) {
    if (failed.load(std::memory_order_relaxed)) return;
    try {
      Rng noise = master.substream((std::uint64_t{1} << 63) +
                                   static_cast<std::uint64_t>(i));
      std::vector<double> x(initial.point(i).begin(), initial.point(i).end());
      std::vector<double> fx(d), g(static_cast<std::size_t>(d) * w), dw(w);
      double t = 0.0;
      for (std::size_t k = 0; k < n_times; ++k) {
        const double span = t_grid[k] - t;
        if (span > 0.0) {
          const auto steps =
              static_cast<long>(std::ceil(span / opts.dt - 1e-12));
          const double h = span / static_cast<double>(steps);
          for (long s = 0; s < steps; ++s) {
            model.drift(x.data(), fx.data());
            model.diffusion(x.data(), g.data());
            for (int c = 0; c < w; ++c) {
              dw[c] = std::sqrt(model.noise_rates[c] * h) * noise.next_normal();
            }
            for (int a = 0; a < d; ++a) {
              double diff = 0.0;
              for (int c = 0; c < w; ++c) diff += g[a * w + c] * dw[c];
              x[a] += h * fx[a] + diff;
              if (!std::isfinite(x[a])) {
                throw std::runtime_error(
                    "propagate_em: non-finite state for particle " +
                    std::to_string(i) + " near t=" +
                    std::to_string(t + (s + 1) * h));
              }
            }
          }
          t = t_grid[k];
        }
        double* dst =
            out[k].ensemble.coords.data() + static_cast<std::size_t>(i) * d;
        for (int a = 0; a < d; ++a) dst[a] = x[a];
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failed.exchange(true)) failure = e.what();
    }
  });
  if (failed.load()) throw std::runtime_error(failure);
  return out;
}

std::vector<EnsembleSnapshot> propagate_em(
    const SdeModel& model, const DensityFamily& initial, std::int64_t n,
    const std::vector<double>& t_grid, std::uint64_t seed, SampleScheme scheme,
    const EmOptions& opts) {
  return propagate_em(model, sample(initial, n, seed, scheme), t_grid, seed,
                      opts);
}

}  // namespace wassval
