#pragma once

#include <Eigen/Core>
#include <functional>
#include <span>
#include <variant>

#include "wassval/densities/ensemble.hpp"

namespace wassval {

// Closed-form density families plus two particle-backed cases. The variant is
// deliberately small: every downstream routine dispatches on the alternative
// it supports and throws a descriptive error otherwise.
struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;  // symmetric positive semi-definite
};

struct UniformBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

// X = a + (b - a) * B with B ~ Beta(alpha, beta); support [a, b].
struct ScaledBeta {
  double alpha = 1.0;
  double beta = 1.0;
  double a = 0.0;
  double b = 1.0;
};

// Arcsine law on [a, b]; equals ScaledBeta{1/2, 1/2, a, b}.
struct Arcsine {
  double a = 0.0;
  double b = 1.0;
};

// Finite mixture of point masses: the ensemble IS the distribution.
struct DiracMixture {
  ParticleEnsemble atoms;
};

// Sample cloud standing in for an unknown law; no pdf, moments from weights.
struct Empirical {
  ParticleEnsemble points;
};

using DensityFamily = std::variant<Gaussian, UniformBox, ScaledBeta, Arcsine,
                                   DiracMixture, Empirical>;

int dimension(const DensityFamily& family);

// Pointwise density. Throws for DiracMixture and Empirical (no Lebesgue
// density). make_pdf precomputes factorizations so grid sweeps stay cheap.
std::function<double(std::span<const double>)> make_pdf(
    const DensityFamily& family);
double pdf(const DensityFamily& family, std::span<const double> x);

// Raw moment E[X^order], order in {1, 2}, one-dimensional families only
// (DiracMixture/Empirical must have dim == 1).
double raw_moment(const DensityFamily& family, int order);

// Differential entropy of Beta(alpha, beta) on [0, 1]:
//   log B(a,b) - (a-1)(psi(a) - psi(a+b)) - (b-1)(psi(b) - psi(a+b)).
double beta_entropy(double alpha, double beta);

}  // namespace wassval
