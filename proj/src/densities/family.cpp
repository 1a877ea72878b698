#include "wassval/densities/family.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wassval/core/numerics.hpp"

namespace wassval {

namespace {

void require_1d(int dim, const char* who) {
  if (dim != 1) {
    throw std::invalid_argument(std::string(who) +
                                ": one-dimensional family required");
  }
}

double beta_density(double alpha, double beta, double u) {
  if (u <= 0.0 || u >= 1.0) {
    // Endpoint limits: finite only when the exponent is >= 0.
    if ((u == 0.0 && alpha < 1.0) || (u == 1.0 && beta < 1.0)) {
      return std::numeric_limits<double>::infinity();
    }
    if (u < 0.0 || u > 1.0) return 0.0;
  }
  const double log_pdf = (alpha - 1.0) * std::log(u) +
                         (beta - 1.0) * std::log1p(-u) -
                         num::log_beta(alpha, beta);
  return std::exp(log_pdf);
}

double ensemble_moment(const ParticleEnsemble& ensemble, int order) {
  require_1d(ensemble.dim, "raw_moment");
  double acc = 0.0;
  for (std::int64_t i = 0; i < ensemble.size(); ++i) {
    const double x = ensemble.point(i)[0];
    acc += ensemble.weights[static_cast<std::size_t>(i)] *
           (order == 1 ? x : x * x);
  }
  return acc;
}

}  // namespace

int dimension(const DensityFamily& family) {
  return std::visit(
      [](const auto& f) -> int {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          return static_cast<int>(f.mean.size());
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          return static_cast<int>(f.lo.size());
        } else if constexpr (std::is_same_v<T, ScaledBeta> ||
                             std::is_same_v<T, Arcsine>) {
          return 1;
        } else if constexpr (std::is_same_v<T, DiracMixture>) {
          return f.atoms.dim;
        } else {
          return f.points.dim;
        }
      },
      family);
}

std::function<double(std::span<const double>)> make_pdf(
    const DensityFamily& family) {
  if (const auto* g = std::get_if<Gaussian>(&family)) {
    const int d = static_cast<int>(g->mean.size());
    if (g->cov.rows() != d || g->cov.cols() != d) {
      throw std::invalid_argument("pdf: covariance shape mismatch");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g->cov);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("pdf: covariance not positive definite");
    }
    double log_det = 0.0;
    for (int i = 0; i < d; ++i) {
      log_det += 2.0 * std::log(llt.matrixL()(i, i));
    }
    const double log_norm =
        -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det);
    Eigen::VectorXd mean = g->mean;
    return [llt, mean, log_norm](std::span<const double> x) {
      Eigen::Map<const Eigen::VectorXd> xv(x.data(),
                                           static_cast<Eigen::Index>(x.size()));
      Eigen::VectorXd centered = xv - mean;
      const double quad = centered.dot(llt.solve(centered));
      return std::exp(log_norm - 0.5 * quad);
    };
  }
  if (const auto* u = std::get_if<UniformBox>(&family)) {
    Eigen::VectorXd lo = u->lo;
    Eigen::VectorXd hi = u->hi;
    double volume = 1.0;
    for (int i = 0; i < lo.size(); ++i) {
      if (!(hi[i] > lo[i])) {
        throw std::invalid_argument("pdf: degenerate uniform box");
      }
      volume *= hi[i] - lo[i];
    }
    const double height = 1.0 / volume;
    return [lo, hi, height](std::span<const double> x) {
      for (int i = 0; i < lo.size(); ++i) {
        if (x[static_cast<std::size_t>(i)] < lo[i] ||
            x[static_cast<std::size_t>(i)] > hi[i]) {
          return 0.0;
        }
      }
      return height;
    };
  }
  if (const auto* sb = std::get_if<ScaledBeta>(&family)) {
    const ScaledBeta b = *sb;
    if (!(b.b > b.a) || b.alpha <= 0.0 || b.beta <= 0.0) {
      throw std::invalid_argument("pdf: bad scaled-beta parameters");
    }
    return [b](std::span<const double> x) {
      const double u = (x[0] - b.a) / (b.b - b.a);
      return beta_density(b.alpha, b.beta, u) / (b.b - b.a);
    };
  }
  if (const auto* ar = std::get_if<Arcsine>(&family)) {
    const ScaledBeta as{0.5, 0.5, ar->a, ar->b};
    return make_pdf(DensityFamily{as});
  }
  throw std::invalid_argument(
      "pdf: particle-backed families have no Lebesgue density");
}

double pdf(const DensityFamily& family, std::span<const double> x) {
  return make_pdf(family)(x);
}

double raw_moment(const DensityFamily& family, int order) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("raw_moment: order must be 1 or 2");
  }
  return std::visit(
      [order](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Gaussian>) {
          require_1d(static_cast<int>(f.mean.size()), "raw_moment");
          const double mu = f.mean[0];
          return order == 1 ? mu : mu * mu + f.cov(0, 0);
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          require_1d(static_cast<int>(f.lo.size()), "raw_moment");
          const double a = f.lo[0];
          const double b = f.hi[0];
          return order == 1 ? 0.5 * (a + b) : (a * a + a * b + b * b) / 3.0;
        } else if constexpr (std::is_same_v<T, ScaledBeta>) {
          const double s = f.alpha + f.beta;
          const double m1 = f.alpha / s;
          if (order == 1) return f.a + (f.b - f.a) * m1;
          const double m2 = f.alpha * (f.alpha + 1.0) / (s * (s + 1.0));
          const double w = f.b - f.a;
          return f.a * f.a + 2.0 * f.a * w * m1 + w * w * m2;
        } else if constexpr (std::is_same_v<T, Arcsine>) {
          return raw_moment(DensityFamily{ScaledBeta{0.5, 0.5, f.a, f.b}},
                            order);
        } else if constexpr (std::is_same_v<T, DiracMixture>) {
          return ensemble_moment(f.atoms, order);
        } else {
          return ensemble_moment(f.points, order);
        }
      },
      family);
}

double beta_entropy(double alpha, double beta) {
  if (alpha <= 0.0 || beta <= 0.0) {
    throw std::invalid_argument("beta_entropy: parameters must be positive");
  }
  const double psi_sum = num::digamma(alpha + beta);
  return num::log_beta(alpha, beta) -
         (alpha - 1.0) * (num::digamma(alpha) - psi_sum) -
         (beta - 1.0) * (num::digamma(beta) - psi_sum);
}

}  // namespace wassval
