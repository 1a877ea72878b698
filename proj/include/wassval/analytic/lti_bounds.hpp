#pragma once

#include <Eigen/Core>

namespace wassval {

// Two discrete-time LTI systems x_{k+1} = A x_k and x_{k+1} = A_hat x_k,
// compared from the shared initial law N(0, P0). Both matrices must be
// Schur stable (spectral radius < 1) and P0 symmetric positive definite.
struct LtiPair {
  Eigen::MatrixXd a;
  Eigen::MatrixXd a_hat;
  Eigen::MatrixXd p0;
};

struct LtiBoundsResult {
  double w2 = 0.0;             // exact gap between N(0, P_k) and N(0, P_hat_k)
  double sqrt_bound = 0.0;     // ||P_k^{1/2} - P_hat_k^{1/2}||_F (always >= w2)
  double spectral_bound = 0.0;  // sqrt(2) tr(P0)^{1/2} ||A_hat^{-k}||_F Omega(k)
  bool spectral_bound_valid = false;
};

// Exact W2(k) and its two upper bounds at step k >= 0, with
// P_k = A^k P0 (A^k)^T and P_hat_k likewise. The square-root bound is the
// Frobenius distance of the covariance square roots; it matches w2 exactly
// when P_k and P_hat_k commute. The spectral bound uses
//   Omega(k)^2 = ||A^k||_F^2 ||A_hat^{-k}||_F^2 tr(P0)^2
//              - log prod_i |theta_i|^{2k} / |theta_hat_i|^{2k} - n,
// with {theta_i}, {theta_hat_i} the two spectra; complex eigenvalues enter
// through their moduli, which keeps the log real. spectral_bound_valid is
// false when A_hat is singular (the ||A_hat^{-k}||_F factor does not exist)
// or when the Omega radicand comes out negative (possible for small tr(P0),
// where the stated expression stops being a bound certificate).
LtiBoundsResult lti_bounds(const LtiPair& pair, int k);

}  // namespace wassval
