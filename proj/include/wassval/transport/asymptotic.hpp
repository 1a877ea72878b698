#pragma once

#include <Eigen/Dense>
#include <variant>

#include "wassval/densities/ensemble.hpp"

namespace wassval {

// Long-run Wasserstein gap between the output laws of two systems, organized
// by the structure of each side's stationary behavior. Output maps are the
// linear y = C x throughout; dimensions must agree across the pair.

// Both systems are asymptotically stable linear ODEs: every trajectory decays
// to the origin, both output laws collapse to the same Dirac, and the gap is
// exactly zero. The matrices are still validated (Hurwitz) so that a
// non-decaying pair cannot silently report zero.
struct DeterministicLinearGapCase {
  Eigen::MatrixXd a, c;
  Eigen::MatrixXd a_hat, c_hat;
};

// Affine dynamics dx/dt = A x + b with output y = C x + d. Each side settles
// at its equilibrium x* = -A^{-1} b, so the gap is the distance between the
// two limiting output points ||(d - d_hat) - (C A^{-1} b - C_hat A_hat^{-1}
// b_hat)||.
struct AffineGapCase {
  Eigen::MatrixXd a, c;
  Eigen::VectorXd b, d;
  Eigen::MatrixXd a_hat, c_hat;
  Eigen::VectorXd b_hat, d_hat;
};

// Linear SDEs dx = A x dt + B dbeta with E[dbeta dbeta^T] = diag(q) dt. Each
// side's stationary law is a centered Gaussian with state covariance solving
// A S + S A^T + B diag(q) B^T = 0; the gap is the Gaussian closed form
// between the output covariances C S C^T.
struct StochasticLinearGapCase {
  Eigen::MatrixXd a, b, c;
  Eigen::VectorXd q;
  Eigen::MatrixXd a_hat, b_hat, c_hat;
  Eigen::VectorXd q_hat;
};

// Both stationary laws are finite mixtures of point masses in output space
// (e.g. attractor masses of a multistable flow on one side, the origin Dirac
// of a stable linear model on the other). The gap is the exact transport LP
// between the two weighted atom sets.
struct DiracMixtureGapCase {
  ParticleEnsemble truth;
  ParticleEnsemble model;
};

using AsymptoticGapCase =
    std::variant<DeterministicLinearGapCase, AffineGapCase,
                 StochasticLinearGapCase, DiracMixtureGapCase>;

// Evaluates the stationary gap for the given case. Throws std::invalid_argument
// on dimension mismatches, a singular A in the affine case, or a non-Hurwitz
// state matrix where stability is required.
double asymptotic_gap(const AsymptoticGapCase& c);

}  // namespace wassval
