#include "wassval/analytic/scalar_gaps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wassval/core/numerics.hpp"

namespace wassval {

namespace {

void require_stable(const ScalarLinearPair& pair) {
  if (!(pair.a1 < 0.0) || !(pair.a2 < 0.0)) {
    throw std::invalid_argument("scalar pair: drift coefficients must be < 0");
  }
  if (!(pair.c1 > 0.0) || !(pair.c2 > 0.0)) {
    throw std::invalid_argument("scalar pair: output gains must be > 0");
  }
}

void require_m20(double m20) {
  if (!(m20 >= 0.0)) {
    throw std::invalid_argument("scalar pair: m20 must be >= 0");
  }
}

double p_factor(const ScalarLinearPair& pair, double t) {
  return pair.c1 * std::exp(pair.a1 * t) - pair.c2 * std::exp(pair.a2 * t);
}

double q_factor(const ScalarLinearPair& pair, double t) {
  return pair.b1 * pair.c1 / pair.a1 * (std::exp(pair.a1 * t) - 1.0) -
         pair.b2 * pair.c2 / pair.a2 * (std::exp(pair.a2 * t) - 1.0) +
         (pair.d1 - pair.d2);
}

double r_factor(const ScalarLinearPair& pair, double t) {
  const double v1 = (std::exp(2.0 * pair.a1 * t) - 1.0) / (2.0 * pair.a1);
  const double v2 = (std::exp(2.0 * pair.a2 * t) - 1.0) / (2.0 * pair.a2);
  return pair.c1 * std::abs(pair.sigma1) * std::sqrt(std::max(0.0, v1)) -
         pair.c2 * std::abs(pair.sigma2) * std::sqrt(std::max(0.0, v2));
}

}  // namespace

double w2_scalar_linear(const ScalarLinearPair& pair, double m20, double t) {
  require_stable(pair);
  require_m20(m20);
  return std::sqrt(m20) * std::abs(p_factor(pair, t));
}

double w2_scalar_linear_map(const ScalarLinearPair& pair, double m20, long k) {
  require_m20(m20);
  if (!(pair.a1 > 0.0 && pair.a1 < 1.0 && pair.a2 > 0.0 && pair.a2 < 1.0)) {
    throw std::invalid_argument(
        "scalar map pair: contraction factors must lie in (0, 1)");
  }
  if (!(pair.c1 > 0.0) || !(pair.c2 > 0.0)) {
    throw std::invalid_argument("scalar map pair: output gains must be > 0");
  }
  if (k < 0) {
    throw std::invalid_argument("scalar map pair: step must be >= 0");
  }
  return std::sqrt(m20) *
         std::abs(pair.c1 * std::pow(pair.a1, static_cast<double>(k)) -
                  pair.c2 * std::pow(pair.a2, static_cast<double>(k)));
}

double w2_scalar_affine(const ScalarLinearPair& pair, double m10, double m20,
                        double t) {
  require_stable(pair);
  require_m20(m20);
  if (m10 * m10 > m20 * (1.0 + 1e-12) + 1e-300) {
    throw std::invalid_argument(
        "scalar pair: moments violate m10^2 <= m20 (not a distribution)");
  }
  const double p = p_factor(pair, t);
  const double q = q_factor(pair, t);
  const double sq = p * p * m20 + 2.0 * p * q * m10 + q * q;
  return std::sqrt(std::max(0.0, sq));
}

double w2_scalar_sde(const ScalarLinearPair& pair, double m20, double s_f0,
                     double t) {
  require_stable(pair);
  require_m20(m20);
  if (s_f0 * s_f0 > m20 * (1.0 + 1e-12) + 1e-300) {
    throw std::invalid_argument(
        "scalar pair: |s(F0)| cannot exceed sqrt(m20)");
  }
  const double p = p_factor(pair, t);
  const double r = r_factor(pair, t);
  const double sq = p * p * m20 + 2.0 * p * r * s_f0 + r * r;
  return std::sqrt(std::max(0.0, sq));
}

double s_statistic(const Cdf1D& f0) {
  if (f0.is_step()) {
    // Between consecutive cumulative levels the quantile is the constant atom
    // position, and the standard normal quantile integrates in closed form:
    //   d/dv [-pdf(QN(v))] = QN(v).
    const auto& xs = f0.atom_positions();
    const auto& cum = f0.atom_cumulative();
    auto anti = [](double v) {
      if (v <= 0.0 || v >= 1.0) return 0.0;
      return -num::normal_pdf(num::normal_quantile(v));
    };
    double sum = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double next = cum[i];
      sum += xs[i] * (anti(next) - anti(prev));
      prev = next;
    }
    return sum;
  }
  return num::integrate_tanh_sinh(
      [&f0](double v) { return f0.quantile(v) * num::normal_quantile(v); },
      0.0, 1.0, 1e-11);
}

}  // namespace wassval
