#pragma once

#include <Eigen/Core>
#include <functional>

namespace wassval {

// Comparison of KL divergence against the W2 distance for a homoscedastic
// Gaussian pair N(m1, S), N(m2, S): the two densities differ only by a
// translation, yet D_KL = m^T S^{-1} m / 2 (m = m2 - m1) still depends on S.
// The ratio D_KL / W2 = (|m|/2) * Rayleigh(S^{-1}, m) is trapped in
// [ |m| / (2 lambda_max(S)), |m| / (2 lambda_min(S)) ], with the ends
// attained when m aligns with the corresponding eigenvectors of S.
struct KlW2Comparison {
  double d_kl = 0.0;
  double w2 = 0.0;     // = |m2 - m1|
  double ratio = 0.0;  // d_kl / w2, defined as 0 when m1 == m2
  double lower = 0.0;  // |m| / (2 lambda_max(S))
  double upper = 0.0;  // |m| / (2 lambda_min(S))
};

KlW2Comparison gaussian_kl_diag(const Eigen::VectorXd& m1,
                                const Eigen::VectorXd& m2,
                                const Eigen::MatrixXd& sigma);

// Long-run behavior of the multiplicative-noise logistic map as decided by
// the sign of E[log zeta]: negative sends states to zero almost surely,
// exactly zero sends them to zero in probability only, positive admits a
// stationary density on (0, 1).
enum class NoiseAsymptote {
  kAlmostSureZero,
  kInProbabilityZero,
  kStationaryExists,
};

struct LogNoiseResult {
  double mean_log = 0.0;  // integral of log(z) phi(z) dz over [lo, hi]
  NoiseAsymptote classification = NoiseAsymptote::kInProbabilityZero;
};

// Sign classification with tolerance band around zero (quadrature noise
// should not flip a genuinely zero mean into a side case).
NoiseAsymptote classify_log_noise(double mean_log, double tol = 1e-9);

// Integrates log(z) phi(z) over [lo, hi] by tanh-sinh quadrature (the log
// endpoint singularity at lo = 0 is integrable and the nodes approach it
// geometrically), then classifies the sign. phi is used as given -- it is
// not renormalized over the interval.
LogNoiseResult log_noise_sign(const std::function<double(double)>& phi,
                              double lo = 0.0, double hi = 4.0);

}  // namespace wassval
