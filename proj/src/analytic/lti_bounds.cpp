#include "wassval/analytic/lti_bounds.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wassval/transport/wasserstein.hpp"

namespace wassval {

namespace {

double spectral_radius(const Eigen::MatrixXd& m) {
  return Eigen::EigenSolver<Eigen::MatrixXd>(m, /*computeEigenvectors=*/false)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

double log_abs_det(const Eigen::MatrixXd& m) {
  // sum of log-moduli of the eigenvalues; -inf when singular
  const auto eigs =
      Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) {
    sum += std::log(std::abs(eigs[i]));
  }
  return sum;
}

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int k) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) out = out * m;
  return out;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return es.eigenvectors() *
         es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

}  // namespace

LtiBoundsResult lti_bounds(const LtiPair& pair, int k) {
  const Eigen::Index n = pair.a.rows();
  if (pair.a.cols() != n || pair.a_hat.rows() != n || pair.a_hat.cols() != n ||
      pair.p0.rows() != n || pair.p0.cols() != n || n == 0) {
    throw std::invalid_argument("lti_bounds: matrices must be square and of "
                                "one common dimension");
  }
  if (k < 0) {
    throw std::invalid_argument("lti_bounds: step must be >= 0");
  }
  if ((pair.p0 - pair.p0.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("lti_bounds: P0 must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p0_eigs(pair.p0);
  if (p0_eigs.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("lti_bounds: P0 must be positive definite");
  }
  if (spectral_radius(pair.a) >= 1.0 || spectral_radius(pair.a_hat) >= 1.0) {
    throw std::invalid_argument(
        "lti_bounds: both systems must be Schur stable (spectral radius < 1)");
  }

  const Eigen::MatrixXd ak = matrix_power(pair.a, k);
  const Eigen::MatrixXd ak_hat = matrix_power(pair.a_hat, k);
  const Eigen::MatrixXd pk = ak * pair.p0 * ak.transpose();
  const Eigen::MatrixXd pk_hat = ak_hat * pair.p0 * ak_hat.transpose();

  LtiBoundsResult out;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  out.w2 = w2_gaussian(zero, pk, zero, pk_hat);
  out.sqrt_bound = (psd_sqrt(pk) - psd_sqrt(pk_hat)).norm();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(pair.a_hat);
  if (!lu.isInvertible()) {
    out.spectral_bound_valid = false;
    return out;
  }
  const Eigen::MatrixXd ak_hat_inv = matrix_power(lu.inverse(), k);
  const double tr_p0 = pair.p0.trace();
  const double log_det_ratio =
      k == 0 ? 0.0
             : 2.0 * k * (log_abs_det(pair.a) - log_abs_det(pair.a_hat));
  const double omega_sq = ak.squaredNorm() * ak_hat_inv.squaredNorm() *
                              tr_p0 * tr_p0 -
                          log_det_ratio - static_cast<double>(n);
  if (omega_sq < 0.0 || !std::isfinite(omega_sq)) {
    out.spectral_bound_valid = false;
    return out;
  }
  out.spectral_bound = std::sqrt(2.0) * std::sqrt(tr_p0) * ak_hat_inv.norm() *
                       std::sqrt(omega_sq);
  out.spectral_bound_valid = true;
  return out;
}

}  // namespace wassval
