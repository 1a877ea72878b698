#pragma once

#include <functional>
#include <vector>

#include "wassval/densities/cdf.hpp"
#include "wassval/dynamics/models.hpp"

namespace wassval {

// Density samples at the M cell midpoints of a uniform partition of [lo, hi]
// (an open grid: the endpoints themselves are never evaluated, which keeps
// arcsine-type endpoint singularities finite). The integral is the midpoint
// rule, exact enough that normalize() holds it at 1 within 1e-6.
struct DensityGrid1D {
  double lo = 0.0, hi = 1.0;
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double cell_width() const { return (hi - lo) / size(); }
  double node(int i) const { return lo + (i + 0.5) * cell_width(); }
  double integral() const;
  void normalize();  // throws if the integral is not positive and finite
  // Linear interpolation between midpoints, clamped to the edge cells.
  double interpolate(double x) const;
};

// Fills a grid from a pdf evaluator and normalizes it.
DensityGrid1D grid_from_pdf(const std::function<double(double)>& pdf,
                            double lo, double hi, int m = 1024);

// Piecewise-linear CDF through the cumulative cell masses (after
// normalization), for quantile-based distance computations.
Cdf1D grid_to_cdf(const DensityGrid1D& grid);

// Exact two-branch transfer-operator images for the quadratic conjugate maps,
// applied to an arbitrary density evaluator:
//   cos(2 acos x) on [-1,1]:
//     (P xi)(x) = [xi(r) + xi(-r)] / (2 sqrt(2x+2)),  r = sqrt((x+1)/2)
//   4x(1-x) on [0,1]:
//     (P xi)(x) = [xi((1+r)/2) + xi((1-r)/2)] / (4r), r = sqrt(1-x)
double pf_chebyshev(const std::function<double(double)>& xi, double x);
double pf_logistic(const std::function<double(double)>& xi, double x);

// Iterates the Chebyshev or logistic transfer operator at the distribution-
// function level, with no grid anywhere: one step maps F to
//   chebyshev:  F'(x) = F(r) - F(-r),            r = sqrt((x+1)/2)
//   logistic:   F'(x) = F((1-r)/2) + 1 - F((1+r)/2), r = sqrt(1-x)
// (the initial-measure mass of the map's preimage of (-inf, x]). Evaluation
// cost doubles per iteration, so keep iterations modest (<= ~16). The
// quantile function is computed by bisection.
Cdf1D pf_iterate_cdf(MapKind kind, std::function<double(double)> cdf0,
                     int iterations);

// One transfer-operator step on a grid density. Dispatch:
//  - Chebyshev/logistic deterministic maps: exact preimage formulas nodewise,
//    reading xi by interpolation;
//  - generic deterministic maps: cell-mapping (Ulam) mass transfer with 32
//    sample points per source cell;
//  - stochastic maps: Gauss-Legendre quadrature of the kernel integral over
//    the grid support (200 nodes, doubled once as a convergence check; a
//    change above 1e-6 is logged as a warning).
// The output is clamped nonnegative and renormalized to unit integral.
DensityGrid1D pf_step(const MapModel& map, const DensityGrid1D& density);

}  // namespace wassval
