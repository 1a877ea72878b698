#pragma once

#include "wassval/densities/cdf.hpp"

namespace wassval {

// A pair of scalar linear systems under comparison,
//   dx_i/dt = a_i x + b_i,   y_i = c_i x + d_i,   i = 1, 2,
// optionally driven by noise with diffusion magnitude sigma_i:
//   dx_i = (a_i x + b_i) dt + sigma_i d(beta).
// Stability a_i < 0 and output gain c_i > 0 are required throughout; the
// closed forms below integrate e^{2 a t} terms that need a < 0 to stay
// bounded, and positive gains keep the output quantile functions increasing
// (which is what reduces W2 to the moment expressions).
struct ScalarLinearPair {
  double a1 = -1.0, c1 = 1.0;
  double a2 = -1.0, c2 = 1.0;
  double b1 = 0.0, b2 = 0.0;          // drift offsets
  double d1 = 0.0, d2 = 0.0;          // output offsets
  double sigma1 = 0.0, sigma2 = 0.0;  // diffusion magnitudes (SDE case)
};

// W2(t) between the two noiseless linear systems (offsets ignored):
//   sqrt(m20) * |c1 e^{a1 t} - c2 e^{a2 t}|,
// where m20 is the second raw moment of the shared initial density. The gap
// depends on the initial law only through m20.
double w2_scalar_linear(const ScalarLinearPair& pair, double m20, double t);

// Discrete-time analogue for the linear maps x_{k+1} = a_i x_k, y = c_i x:
//   W(k) = sqrt(m20) * |c1 a1^k - c2 a2^k|.
// Requires a_i in (0, 1): positive so both output maps are increasing (the
// reduction to m20 needs a common monotone rearrangement), below one for
// stability.
double w2_scalar_linear_map(const ScalarLinearPair& pair, double m20, long k);

// W2(t) between the two affine systems:
//   sqrt(p(t)^2 m20 + 2 p(t) q(t) m10 + q(t)^2),
// p(t) = c1 e^{a1 t} - c2 e^{a2 t},
// q(t) = (b1 c1/a1)(e^{a1 t} - 1) - (b2 c2/a2)(e^{a2 t} - 1) + (d1 - d2);
// m10, m20 are the first and second raw moments of the initial density.
double w2_scalar_affine(const ScalarLinearPair& pair, double m10, double m20,
                        double t);

// W2(t) between the two linear SDEs (drift/output offsets ignored):
//   sqrt(p(t)^2 m20 + 2 p(t) r(t) s_f0 + r(t)^2),
// r(t) = c1 sigma1 sqrt((e^{2 a1 t} - 1)/(2 a1))
//      - c2 sigma2 sqrt((e^{2 a2 t} - 1)/(2 a2)),
// and s_f0 = s_statistic(initial CDF). For a Gaussian initial density
// s_f0 equals its standard deviation.
double w2_scalar_sde(const ScalarLinearPair& pair, double m20, double s_f0,
                     double t);

// The initial-law statistic pairing the initial quantile with the standard
// normal quantile:
//   s(F0) = integral over (0,1) of Q0(v) * QN(v) dv
//         = sqrt(2) E[x0 * erf^{-1}(2 F0(x0) - 1)].
// Computed exactly for purely atomic CDFs (the normal quantile integrates in
// closed form between atom masses) and by tanh-sinh quadrature otherwise.
// By Cauchy-Schwarz |s(F0)| <= sqrt(m20).
double s_statistic(const Cdf1D& f0);

}  // namespace wassval
