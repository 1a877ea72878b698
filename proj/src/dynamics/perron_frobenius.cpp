#include "wassval/dynamics/perron_frobenius.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wassval/core/log.hpp"
#include "wassval/core/numerics.hpp"

namespace wassval {
namespace {

DensityGrid1D like(const DensityGrid1D& g) {
  DensityGrid1D out;
  out.lo = g.lo;
  out.hi = g.hi;
  out.values.assign(g.values.size(), 0.0);
  return out;
}

DensityGrid1D ulam_step(const DeterministicMap& map,
                        const DensityGrid1D& density) {
  // Push each source cell's mass forward through the map, sampling the cell
  // at 32 interior points and splitting its mass equally among their images.
  constexpr int kSamplesPerCell = 32;
  const int m = density.size();
  const double h = density.cell_width();
  DensityGrid1D out = like(density);
  for (int j = 0; j < m; ++j) {
    const double mass = density.values[j] * h / kSamplesPerCell;
    if (mass == 0.0) continue;
    const double cell_lo = density.lo + j * h;
    for (int s = 0; s < kSamplesPerCell; ++s) {
      const double y = cell_lo + (s + 0.5) * h / kSamplesPerCell;
      const double x = map.forward(y);
      if (!std::isfinite(x)) {
        throw std::runtime_error("pf_step: map image is non-finite");
      }
      int cell = static_cast<int>(std::floor((x - density.lo) / h));
      cell = std::clamp(cell, 0, m - 1);
      out.values[cell] += mass;
    }
  }
  for (double& v : out.values) v /= h;  // masses back to densities
  return out;
}

// Kernel-integral step: out(x) = integral over [lo,hi] of xi(y) K(x, y) dy,
// evaluated with an n-node Gauss-Legendre rule.
template <typename Kernel>
DensityGrid1D kernel_step_n(const DensityGrid1D& density, Kernel kernel,
                            int n) {
  const auto& rule = num::gauss_legendre(n);
  const double mid = 0.5 * (density.lo + density.hi);
  const double half = 0.5 * (density.hi - density.lo);
  std::vector<double> ys(n), xi(n);
  for (int q = 0; q < n; ++q) {
    ys[q] = mid + half * rule.nodes[q];
    xi[q] = density.interpolate(ys[q]);
  }
  DensityGrid1D out = like(density);
  for (int i = 0; i < out.size(); ++i) {
    const double x = out.node(i);
    double acc = 0.0;
    for (int q = 0; q < n; ++q) {
      acc += rule.weights[q] * xi[q] * kernel(x, ys[q]);
    }
    out.values[i] = half * acc;
  }
  return out;
}

template <typename Kernel>
DensityGrid1D kernel_step(const DensityGrid1D& density, Kernel kernel) {
  DensityGrid1D coarse = kernel_step_n(density, kernel, 200);
  DensityGrid1D fine = kernel_step_n(density, kernel, 400);
  double max_change = 0.0;
  for (int i = 0; i < coarse.size(); ++i) {
    max_change =
        std::max(max_change, std::abs(fine.values[i] - coarse.values[i]));
  }
  if (max_change > 1e-6) {
    log_warn("pf_step: kernel quadrature changed by " +
             std::to_string(max_change) +
             " when doubling nodes; result may be under-resolved");
  }
  return fine;
}

}  // namespace

double DensityGrid1D::integral() const {
  double acc = 0.0;
  for (double v : values) acc += v;
  return acc * cell_width();
}

void DensityGrid1D::normalize() {
  const double total = integral();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::runtime_error(
        "DensityGrid1D::normalize: integral is not positive and finite");
  }
  for (double& v : values) v /= total;
}

double DensityGrid1D::interpolate(double x) const {
  const int m = size();
  const double h = cell_width();
  const double u = (x - lo) / h - 0.5;  // node index coordinate
  if (u <= 0.0) return values.front();
  if (u >= m - 1.0) return values.back();
  const int i = static_cast<int>(u);
  const double frac = u - i;
  return values[i] + frac * (values[i + 1] - values[i]);
}

DensityGrid1D grid_from_pdf(const std::function<double(double)>& pdf,
                            double lo, double hi, int m) {
  if (!(hi > lo) || m < 2) {
    throw std::invalid_argument("grid_from_pdf: bad interval or node count");
  }
  DensityGrid1D grid;
  grid.lo = lo;
  grid.hi = hi;
  grid.values.resize(m);
  for (int i = 0; i < m; ++i) {
    const double v = pdf(grid.node(i));
    if (!std::isfinite(v) || v < 0.0) {
      throw std::runtime_error(
          "grid_from_pdf: pdf non-finite or negative at a grid node");
    }
    grid.values[i] = v;
  }
  grid.normalize();
  return grid;
}

Cdf1D grid_to_cdf(const DensityGrid1D& grid) {
  const int m = grid.size();
  const double h = grid.cell_width();
  std::vector<double> xs(m + 1), cum(m + 1);
  xs[0] = grid.lo;
  cum[0] = 0.0;
  for (int i = 0; i < m; ++i) {
    xs[i + 1] = grid.lo + (i + 1) * h;
    cum[i + 1] = cum[i] + grid.values[i] * h;
  }
  const double total = cum[m];
  if (!(total > 0.0)) {
    throw std::runtime_error("grid_to_cdf: zero total mass");
  }
  for (double& c : cum) c /= total;
  return Cdf1D::piecewise_linear(std::move(xs), std::move(cum));
}

double pf_chebyshev(const std::function<double(double)>& xi, double x) {
  if (x <= -1.0 || x >= 1.0) {
    throw std::domain_error("pf_chebyshev: point outside (-1, 1)");
  }
  const double r = std::sqrt((x + 1.0) / 2.0);
  return (xi(r) + xi(-r)) / (2.0 * std::sqrt(2.0 * x + 2.0));
}

double pf_logistic(const std::function<double(double)>& xi, double x) {
  if (x <= 0.0 || x >= 1.0) {
    throw std::domain_error("pf_logistic: point outside (0, 1)");
  }
  const double r = std::sqrt(1.0 - x);
  return (xi(0.5 * (1.0 + r)) + xi(0.5 * (1.0 - r))) / (4.0 * r);
}

Cdf1D pf_iterate_cdf(MapKind kind, std::function<double(double)> cdf0,
                     int iterations) {
  if (!cdf0) {
    throw std::invalid_argument("pf_iterate_cdf: empty initial CDF");
  }
  if (iterations < 0 || iterations > 24) {
    throw std::invalid_argument(
        "pf_iterate_cdf: iterations must lie in [0, 24] (cost doubles per "
        "step)");
  }
  double lo = 0.0, hi = 0.0;
  std::function<double(double)> f = std::move(cdf0);
  switch (kind) {
    case MapKind::kChebyshev:
      lo = -1.0;
      hi = 1.0;
      for (int k = 0; k < iterations; ++k) {
        f = [prev = f](double x) {
          if (x <= -1.0) return 0.0;
          if (x >= 1.0) return 1.0;
          const double r = std::sqrt((x + 1.0) / 2.0);
          return prev(r) - prev(-r);
        };
      }
      break;
    case MapKind::kLogistic:
      lo = 0.0;
      hi = 1.0;
      for (int k = 0; k < iterations; ++k) {
        f = [prev = f](double x) {
          if (x <= 0.0) return 0.0;
          if (x >= 1.0) return 1.0;
          const double r = std::sqrt(1.0 - x);
          return prev(0.5 * (1.0 - r)) + 1.0 - prev(0.5 * (1.0 + r));
        };
      }
      break;
    default:
      throw std::invalid_argument(
          "pf_iterate_cdf: only the closed-form Chebyshev and logistic "
          "operators are supported");
  }
  auto quantile = [f, lo, hi](double p) {
    if (p <= 0.0) return lo;
    if (p >= 1.0) return hi;
    double a = lo, b = hi;
    for (int it = 0; it < 90 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
      const double mid = 0.5 * (a + b);
      (f(mid) < p ? a : b) = mid;
    }
    return 0.5 * (a + b);
  };
  return Cdf1D::analytic(f, quantile, lo, hi);
}

DensityGrid1D pf_step(const MapModel& map, const DensityGrid1D& density) {
  if (density.size() < 2) {
    throw std::invalid_argument("pf_step: grid too small");
  }
  DensityGrid1D out;
  if (const auto* det = std::get_if<DeterministicMap>(&map)) {
    if (density.lo < det->lo - 1e-12 || density.hi > det->hi + 1e-12) {
      throw std::invalid_argument(
          "pf_step: grid interval exceeds the map's declared domain");
    }
    auto xi = [&density](double y) { return density.interpolate(y); };
    switch (det->kind) {
      case MapKind::kChebyshev:
        out = like(density);
        for (int i = 0; i < out.size(); ++i) {
          out.values[i] = pf_chebyshev(xi, out.node(i));
        }
        break;
      case MapKind::kLogistic:
        out = like(density);
        for (int i = 0; i < out.size(); ++i) {
          out.values[i] = pf_logistic(xi, out.node(i));
        }
        break;
      case MapKind::kGeneric:
        out = ulam_step(*det, density);
        break;
    }
  } else if (const auto* mul = std::get_if<MultiplicativeNoiseMap>(&map)) {
    out = kernel_step(density, [mul](double x, double y) {
      const double s = mul->state_map(y);
      if (s <= 0.0) return 0.0;  // kernel mass escapes through S(y) = 0
      return mul->noise_pdf(x / s) / s;
    });
  } else {
    const auto& add = std::get<AdditiveNoiseMap>(map);
    out = kernel_step(density, [&add](double x, double y) {
      return add.noise_pdf(x - add.state_map(y));
    });
  }
  for (double& v : out.values) v = std::max(v, 0.0);
  out.normalize();
  return out;
}

}  // namespace wassval
