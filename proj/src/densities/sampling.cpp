#include "wassval/densities/sampling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wassval/core/numerics.hpp"
#include "wassval/core/rng.hpp"

namespace wassval {

namespace {

std::vector<std::uint32_t> first_primes(int count) {
  std::vector<std::uint32_t> primes;
  primes.reserve(static_cast<std::size_t>(count));
  std::uint32_t candidate = 2;
  while (static_cast<int>(primes.size()) < count) {
    bool is_prime = true;
    for (std::uint32_t p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(candidate);
    ++candidate;
  }
  return primes;
}

// Symmetric square root of a PSD covariance; tiny negative eigenvalues from
// roundoff are clamped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) {
    throw std::invalid_argument("sample: covariance eigendecomposition failed");
  }
  Eigen::VectorXd lambda = es.eigenvalues();
  for (int i = 0; i < lambda.size(); ++i) {
    if (lambda[i] < -1e-10 * std::max(1.0, std::abs(lambda[lambda.size() - 1]))) {
      throw std::invalid_argument("sample: covariance has negative eigenvalue");
    }
    lambda[i] = std::max(lambda[i], 0.0);
  }
  return es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

// Uniform draws for particle i: either a fresh substream of the master seed
// or the i-th Halton point (index i+1, one prime base per axis).
struct UniformSource {
  SampleScheme scheme;
  Rng* master;
  const std::vector<std::uint32_t>* bases;

  std::vector<double> draw(std::int64_t i, int count) const {
    std::vector<double> u(static_cast<std::size_t>(count));
    if (scheme == SampleScheme::kPseudo) {
      Rng sub = master->substream(static_cast<std::uint64_t>(i));
      for (double& v : u) v = sub.next_open01();
    } else {
      for (int j = 0; j < count; ++j) {
        u[static_cast<std::size_t>(j)] = radical_inverse(
            static_cast<std::uint64_t>(i) + 1, (*bases)[static_cast<std::size_t>(j)]);
      }
    }
    return u;
  }
};

}  // namespace

double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv_base = 1.0 / static_cast<double>(base);
  double scale = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return value;
}

ParticleEnsemble sample(const DensityFamily& family, std::int64_t n,
                        std::uint64_t seed, SampleScheme scheme) {
  if (n <= 0) {
    throw std::invalid_argument("sample: n must be positive");
  }
  if (std::holds_alternative<Empirical>(family)) {
    throw std::invalid_argument(
        "sample: empirical families are already sample clouds");
  }
  const int d = dimension(family);
  // Dirac mixtures use a single uniform for atom selection.
  const int draws =
      std::holds_alternative<DiracMixture>(family) ? 1 : d;
  const std::vector<std::uint32_t> bases = first_primes(draws);
  Rng master(seed);
  UniformSource source{scheme, &master, &bases};

  ParticleEnsemble out;
  out.dim = d;
  out.coords.resize(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
  out.weights.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));

  if (const auto* g = std::get_if<Gaussian>(&family)) {
    const Eigen::MatrixXd root = psd_sqrt(g->cov);
    Eigen::VectorXd z(d);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::vector<double> u = source.draw(i, d);
      for (int j = 0; j < d; ++j) {
        z[j] = num::normal_quantile(u[static_cast<std::size_t>(j)]);
      }
      Eigen::VectorXd x = g->mean + root * z;
      std::copy(x.data(), x.data() + d, out.point_mut(i).begin());
    }
    return out;
  }
  if (const auto* box = std::get_if<UniformBox>(&family)) {
    for (std::int64_t i = 0; i < n; ++i) {
      const std::vector<double> u = source.draw(i, d);
      auto pt = out.point_mut(i);
      for (int j = 0; j < d; ++j) {
        pt[static_cast<std::size_t>(j)] =
            box->lo[j] + u[static_cast<std::size_t>(j)] * (box->hi[j] - box->lo[j]);
      }
    }
    return out;
  }
  if (const auto* sb = std::get_if<ScaledBeta>(&family)) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = source.draw(i, 1)[0];
      out.coords[static_cast<std::size_t>(i)] =
          sb->a + (sb->b - sb->a) * num::reg_inc_beta_inv(sb->alpha, sb->beta, u);
    }
    return out;
  }
  if (const auto* ar = std::get_if<Arcsine>(&family)) {
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = source.draw(i, 1)[0];
      const double t = std::sin(0.5 * std::numbers::pi * u);
      out.coords[static_cast<std::size_t>(i)] = ar->a + (ar->b - ar->a) * t * t;
    }
    return out;
  }
  const auto& atoms = std::get<DiracMixture>(family).atoms;
  std::vector<double> cum(atoms.weights.size());
  double running = 0.0;
  for (std::size_t k = 0; k < cum.size(); ++k) {
    running += atoms.weights[k];
    cum[k] = running;
  }
  cum.back() = 1.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double u = source.draw(i, 1)[0];
    const auto it = std::lower_bound(cum.begin(), cum.end(), u);
    const auto k = static_cast<std::int64_t>(it - cum.begin());
    const auto src = atoms.point(k);
    std::copy(src.begin(), src.end(), out.point_mut(i).begin());
  }
  return out;
}

}  // namespace wassval
