#include "wassval/analytic/beta_gap.hpp"

#include <cmath>
#include <stdexcept>

#include "wassval/core/numerics.hpp"

namespace wassval {

namespace {

void require_shape(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) ||
      !std::isfinite(beta)) {
    throw std::invalid_argument("beta gap: shape parameters must be > 0");
  }
}

}  // namespace

double scaled_hyp_incomplete_beta(double a, double b, double x) {
  require_shape(a, b);
  if (!(x >= 0.0) || x >= 1.0) {
    throw std::invalid_argument(
        "scaled_hyp_incomplete_beta: argument must lie in [0, 1)");
  }
  if (x == 0.0) return 0.0;
  if (x <= 0.75) {
    return std::pow(x, b + 1.0) / (b + 1.0) *
           num::hyp2f1(b + 1.0, 1.0 - a, b + 2.0, x);
  }
  return num::inc_beta_unnormalized(b + 1.0, a, x);
}

double beta_cross_quantile_integral(double alpha, double beta) {
  require_shape(alpha, beta);
  const double log_b = num::log_beta(beta, alpha);

  // After substituting x = I_t^{-1}(beta, alpha) the integral becomes
  //   1/B(beta,alpha) * integral over x in (0,1) of
  //     f^{1-alpha} (1-f)^{1-beta} S(x) x^{beta-1} (1-x)^{alpha-1} dx,
  // S(x) = (x^{beta+1}/(beta+1)) 2F1(beta+1, 1-alpha; beta+2; x),
  // f = I^{-1}_{t(x)}(alpha, beta), t(x) = I_x(beta, alpha).
  // The integrand vanishes like x^{beta/alpha + beta} at zero and is an
  // integrable power singularity (1-x)^{alpha/beta - 1} at one, so the two
  // halves below each keep their delicate endpoint at coordinate zero, with
  // every near-endpoint quantity obtained from the small variable through
  // complement identities. Both are assembled in log space: individual
  // factors can overflow/underflow long before the product does.

  // x in (0, 1/2]
  auto lower = [&](double x) {
    const double t = num::reg_inc_beta(beta, alpha, x);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double f = num::reg_inc_beta_inv(alpha, beta, t);
    if (f <= 0.0 || f >= 1.0) return 0.0;
    const double log_s = (beta + 1.0) * std::log(x) - std::log(beta + 1.0) +
                         std::log(num::hyp2f1(beta + 1.0, 1.0 - alpha,
                                              beta + 2.0, x));
    const double log_g = (1.0 - alpha) * std::log(f) +
                         (1.0 - beta) * std::log1p(-f) + log_s +
                         (beta - 1.0) * std::log(x) +
                         (alpha - 1.0) * std::log1p(-x) - log_b;
    return std::exp(log_g);
  };

  // y = 1 - x in (0, 1/2]; w = 1 - f stays accurate via the swapped-parameter
  // inverse, and S(1-y) via the complement of the regularized integral.
  auto upper = [&](double y) {
    const double t_bar = num::reg_inc_beta(alpha, beta, y);  // = 1 - t
    if (t_bar <= 0.0 || t_bar >= 1.0) return 0.0;
    const double w = num::reg_inc_beta_inv(beta, alpha, t_bar);
    if (w <= 0.0 || w >= 1.0) return 0.0;
    const double complement = 1.0 - num::reg_inc_beta(alpha, beta + 1.0, y);
    if (complement <= 0.0) return 0.0;
    const double log_s =
        num::log_beta(beta + 1.0, alpha) + std::log(complement);
    const double log_g = (1.0 - alpha) * std::log1p(-w) +
                         (1.0 - beta) * std::log(w) + log_s +
                         (beta - 1.0) * std::log1p(-y) +
                         (alpha - 1.0) * std::log(y) - log_b;
    return std::exp(log_g);
  };

  return num::integrate_tanh_sinh(lower, 0.0, 0.5, 1e-12) +
         num::integrate_tanh_sinh(upper, 0.0, 0.5, 1e-12);
}

double beta_inverse_square_moment(double alpha, double beta) {
  require_shape(alpha, beta);
  return num::integrate_tanh_sinh(
      [alpha, beta](double t) {
        const double x = num::reg_inc_beta_inv(alpha, beta, t);
        return x * x;
      },
      0.0, 1.0, 1e-12);
}

double beta_beta_w2(double alpha, double beta) {
  require_shape(alpha, beta);
  if (alpha == beta) return 0.0;
  const double moment_sum =
      (alpha * (alpha + 1.0) + beta * (beta + 1.0)) /
      ((alpha + beta) * (alpha + beta + 1.0));
  const double cross = beta / (alpha + beta) -
                       beta_cross_quantile_integral(alpha, beta);
  return std::sqrt(std::max(0.0, moment_sum - 2.0 * cross));
}

}  // namespace wassval
