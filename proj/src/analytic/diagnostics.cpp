#include "wassval/analytic/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "wassval/core/numerics.hpp"

namespace wassval {

KlW2Comparison gaussian_kl_diag(const Eigen::VectorXd& m1,
                                const Eigen::VectorXd& m2,
                                const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = m1.size();
  if (m2.size() != n || sigma.rows() != n || sigma.cols() != n || n == 0) {
    throw std::invalid_argument(
        "gaussian_kl_diag: means and covariance must share one dimension");
  }
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("gaussian_kl_diag: covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  const double lambda_min = es.eigenvalues().minCoeff();
  const double lambda_max = es.eigenvalues().maxCoeff();
  if (!(lambda_min > 0.0)) {
    throw std::invalid_argument(
        "gaussian_kl_diag: covariance must be positive definite");
  }
  const Eigen::VectorXd m = m2 - m1;
  KlW2Comparison out;
  out.w2 = m.norm();
  if (out.w2 == 0.0) return out;
  out.d_kl = 0.5 * m.dot(es.operatorInverseSqrt() *
                         (es.operatorInverseSqrt() * m));
  out.ratio = out.d_kl / out.w2;
  out.lower = out.w2 / (2.0 * lambda_max);
  out.upper = out.w2 / (2.0 * lambda_min);
  return out;
}

NoiseAsymptote classify_log_noise(double mean_log, double tol) {
  if (!(tol >= 0.0)) {
    throw std::invalid_argument("classify_log_noise: tolerance must be >= 0");
  }
  if (mean_log < -tol) return NoiseAsymptote::kAlmostSureZero;
  if (mean_log > tol) return NoiseAsymptote::kStationaryExists;
  return NoiseAsymptote::kInProbabilityZero;
}

LogNoiseResult log_noise_sign(const std::function<double(double)>& phi,
                              double lo, double hi) {
  if (!phi) {
    throw std::invalid_argument("log_noise_sign: density must be callable");
  }
  if (!(0.0 <= lo && lo < hi) || !std::isfinite(hi)) {
    throw std::invalid_argument(
        "log_noise_sign: need 0 <= lo < hi with hi finite");
  }
  LogNoiseResult out;
  out.mean_log = num::integrate_tanh_sinh(
      [&phi](double z) { return z > 0.0 ? std::log(z) * phi(z) : 0.0; }, lo,
      hi, 1e-11);
  out.classification = classify_log_noise(out.mean_log);
  return out;
}

}  // namespace wassval
