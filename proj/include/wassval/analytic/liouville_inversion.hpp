#pragma once

#include <functional>

namespace wassval {

// Interval [lo, hi] of admissible values for one coordinate of a two-point
// measurement: states at the initial and final time, and the parameter range.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

enum class PrajnaVerdict { kInvalidated, kNotInvalidated };

struct PrajnaResult {
  double witness = 0.0;  // 2 * (min |x_T|)^2 * (min p) * T
  PrajnaVerdict verdict = PrajnaVerdict::kNotInvalidated;
};

// Consistency check for the cubic decay model dx/dt = -p x^3 against
// interval-valued measurements: states in X0 at time 0, states in XT at time
// T, parameter in P. Transporting a density that fills XT x P backwards
// requires 1 - 2 x_T^2 p T > 0 across the final support; since the product
// is increasing in x_T^2 and p, the binding corner is (min |x_T|, min p).
// The witness 2 (min |x_T|)^2 (min p) T >= 1 therefore certifies that no
// normalizable density can connect the two supports under the model, and the
// verdict is kInvalidated. Requires nonempty intervals, P contained in
// (0, inf), and XT bounded away from zero (an XT straddling zero defeats the
// corner argument and is rejected).
PrajnaResult prajna_check(Interval x0, Interval xt, Interval p, double time);

// Inverse transport for the same model: given the final-time joint density
// xi_T(x_T, p) and the horizon T, returns the initial density
//   xi_0(x0, p) = (1 + 2 x0^2 p T)^{-3/2} xi_T(x0 / sqrt(1 + 2 x0^2 p T), p)
// that the flow carries exactly onto xi_T. The map shrinks states toward
// zero while preserving sign, so the forward image of xi_0 at time T
// reproduces xi_T.
std::function<double(double, double)> cubic_density_transport(
    std::function<double(double, double)> xi_t, double time);

}  // namespace wassval
