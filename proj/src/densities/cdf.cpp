#include "wassval/densities/cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "wassval/core/numerics.hpp"

namespace wassval {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Interior cumulative levels, deduplicated and clipped to (0, 1).
std::vector<double> interior_levels(const std::vector<double>& cum) {
  std::vector<double> out;
  out.reserve(cum.size());
  for (double c : cum) {
    if (c > 0.0 && c < 1.0) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

Cdf1D Cdf1D::analytic(RealFn cdf, RealFn quantile, double support_lo,
                      double support_hi) {
  Cdf1D out;
  out.kind_ = Kind::Analytic;
  out.cdf_fn_ = std::move(cdf);
  out.quantile_fn_ = std::move(quantile);
  out.lo_ = support_lo;
  out.hi_ = support_hi;
  return out;
}

Cdf1D Cdf1D::step(std::vector<double> positions, std::vector<double> weights) {
  if (positions.size() != weights.size() || positions.empty()) {
    throw std::invalid_argument("Cdf1D::step: bad atom arrays");
  }
  std::vector<std::size_t> order(positions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return positions[a] < positions[b];
  });

  Cdf1D out;
  out.kind_ = Kind::Step;
  double total = 0.0;
  for (std::size_t idx : order) {
    const double x = positions[idx];
    const double w = weights[idx];
    if (!std::isfinite(x) || !std::isfinite(w) || w < 0.0) {
      throw std::invalid_argument("Cdf1D::step: atoms must be finite, w >= 0");
    }
    total += w;
    if (w == 0.0) continue;
    if (!out.xs_.empty() && out.xs_.back() == x) {
      out.cum_.back() += w;  // merge exact duplicates
    } else {
      out.xs_.push_back(x);
      out.cum_.push_back((out.cum_.empty() ? 0.0 : out.cum_.back()) + w);
    }
  }
  if (out.xs_.empty() || total <= 0.0) {
    throw std::invalid_argument("Cdf1D::step: zero total mass");
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("Cdf1D::step: weights must sum to 1");
  }
  for (double& c : out.cum_) c /= total;
  out.cum_.back() = 1.0;
  out.lo_ = out.xs_.front();
  out.hi_ = out.xs_.back();
  out.breakpoints_ = interior_levels(out.cum_);
  return out;
}

Cdf1D Cdf1D::piecewise_linear(std::vector<double> positions,
                              std::vector<double> cum) {
  if (positions.size() != cum.size() || positions.size() < 2) {
    throw std::invalid_argument("Cdf1D::piecewise_linear: bad node arrays");
  }
  for (std::size_t i = 1; i < positions.size(); ++i) {
    if (!(positions[i] > positions[i - 1]) || cum[i] < cum[i - 1]) {
      throw std::invalid_argument(
          "Cdf1D::piecewise_linear: positions must increase, cum nondecrease");
    }
  }
  if (std::abs(cum.front()) > 1e-9 || std::abs(cum.back() - 1.0) > 1e-9) {
    throw std::invalid_argument(
        "Cdf1D::piecewise_linear: cumulative must run from 0 to 1");
  }
  const double span = cum.back() - cum.front();
  const double base = cum.front();
  for (double& c : cum) c = (c - base) / span;
  cum.front() = 0.0;
  cum.back() = 1.0;

  Cdf1D out;
  out.kind_ = Kind::PiecewiseLinear;
  out.xs_ = std::move(positions);
  out.cum_ = std::move(cum);
  out.lo_ = out.xs_.front();
  out.hi_ = out.xs_.back();
  out.breakpoints_ = interior_levels(out.cum_);
  return out;
}

Cdf1D Cdf1D::from_quantile(RealFn quantile, std::vector<double> breakpoints) {
  Cdf1D out;
  out.kind_ = Kind::QuantileOnly;
  out.quantile_fn_ = std::move(quantile);
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                    breakpoints.end());
  out.breakpoints_ = std::move(breakpoints);
  out.lo_ = -kInf;
  out.hi_ = kInf;
  return out;
}

Cdf1D Cdf1D::from_family(const DensityFamily& family) {
  if (dimension(family) != 1) {
    throw std::invalid_argument("Cdf1D::from_family: one-dimensional only");
  }
  if (const auto* g = std::get_if<Gaussian>(&family)) {
    const double mu = g->mean[0];
    const double sigma = std::sqrt(g->cov(0, 0));
    if (!(sigma > 0.0)) {
      throw std::invalid_argument("Cdf1D::from_family: degenerate Gaussian");
    }
    return analytic(
        [mu, sigma](double x) { return num::normal_cdf((x - mu) / sigma); },
        [mu, sigma](double s) { return mu + sigma * num::normal_quantile(s); },
        -kInf, kInf);
  }
  if (const auto* u = std::get_if<UniformBox>(&family)) {
    const double a = u->lo[0];
    const double b = u->hi[0];
    return analytic(
        [a, b](double x) {
          return std::clamp((x - a) / (b - a), 0.0, 1.0);
        },
        [a, b](double s) { return a + s * (b - a); }, a, b);
  }
  if (const auto* sb = std::get_if<ScaledBeta>(&family)) {
    const ScaledBeta p = *sb;
    return analytic(
        [p](double x) {
          const double u01 = std::clamp((x - p.a) / (p.b - p.a), 0.0, 1.0);
          return num::reg_inc_beta(p.alpha, p.beta, u01);
        },
        [p](double s) {
          return p.a + (p.b - p.a) * num::reg_inc_beta_inv(p.alpha, p.beta, s);
        },
        p.a, p.b);
  }
  if (const auto* ar = std::get_if<Arcsine>(&family)) {
    const double a = ar->a;
    const double b = ar->b;
    return analytic(
        [a, b](double x) {
          const double u01 = std::clamp((x - a) / (b - a), 0.0, 1.0);
          return 2.0 / std::numbers::pi * std::asin(std::sqrt(u01));
        },
        [a, b](double s) {
          const double t = std::sin(0.5 * std::numbers::pi * s);
          return a + (b - a) * t * t;
        },
        a, b);
  }
  if (const auto* dm = std::get_if<DiracMixture>(&family)) {
    return from_ensemble(dm->atoms);
  }
  return from_ensemble(std::get<Empirical>(family).points);
}

Cdf1D Cdf1D::from_ensemble(const ParticleEnsemble& ensemble) {
  if (ensemble.dim != 1) {
    throw std::invalid_argument("Cdf1D::from_ensemble: one-dimensional only");
  }
  return step(ensemble.coords, ensemble.weights);
}

double Cdf1D::cdf(double x) const {
  switch (kind_) {
    case Kind::Analytic:
      return cdf_fn_(x);
    case Kind::Step: {
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      if (it == xs_.begin()) return 0.0;
      return cum_[static_cast<std::size_t>(it - xs_.begin()) - 1];
    }
    case Kind::PiecewiseLinear: {
      if (x <= xs_.front()) return 0.0;
      if (x >= xs_.back()) return 1.0;
      const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      const std::size_t j = static_cast<std::size_t>(it - xs_.begin());
      const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
      return cum_[j - 1] + t * (cum_[j] - cum_[j - 1]);
    }
    case Kind::QuantileOnly:
      throw std::logic_error("Cdf1D::cdf: quantile-only distribution");
  }
  throw std::logic_error("Cdf1D::cdf: unreachable");
}

double Cdf1D::quantile(double s) const {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw std::invalid_argument("Cdf1D::quantile: s outside [0, 1]");
  }
  switch (kind_) {
    case Kind::Analytic:
    case Kind::QuantileOnly:
      return quantile_fn_(s);
    case Kind::Step: {
      if (s == 0.0) return xs_.front();
      const auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
      return xs_[static_cast<std::size_t>(it - cum_.begin())];
    }
    case Kind::PiecewiseLinear: {
      if (s == 0.0) return xs_.front();
      if (s == 1.0) return xs_.back();
      const auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
      const std::size_t j = static_cast<std::size_t>(it - cum_.begin());
      if (j == 0) return xs_.front();
      // First index with cum >= s, so cum_[j-1] < s <= cum_[j]: the segment
      // has strictly positive mass and the interpolation is well defined.
      const double t = (s - cum_[j - 1]) / (cum_[j] - cum_[j - 1]);
      return xs_[j - 1] + t * (xs_[j] - xs_[j - 1]);
    }
  }
  throw std::logic_error("Cdf1D::quantile: unreachable");
}

bool Cdf1D::has_unbounded_support() const {
  return std::isinf(lo_) || std::isinf(hi_);
}

const std::vector<double>& Cdf1D::atom_positions() const {
  if (kind_ != Kind::Step) {
    throw std::logic_error("Cdf1D::atom_positions: not a step distribution");
  }
  return xs_;
}

const std::vector<double>& Cdf1D::atom_cumulative() const {
  if (kind_ != Kind::Step) {
    throw std::logic_error("Cdf1D::atom_cumulative: not a step distribution");
  }
  return cum_;
}

}  // namespace wassval
