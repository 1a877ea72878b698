#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <cstdint>
#include <vector>

#include "wassval/densities/cdf.hpp"
#include "wassval/densities/ensemble.hpp"
#include "wassval/transport/network_simplex.hpp"

namespace wassval {

struct W2LpResult {
  double distance = 0.0;  // order-2 Wasserstein distance
  double cost = 0.0;      // optimal transport cost (distance squared)
  std::vector<TransportPlanEntry> plan;  // indices into the input ensembles
  std::int64_t pivots = 0;
};

// Exact order-2 Wasserstein distance between weighted point clouds (squared
// Euclidean ground cost) via network simplex. Zero-weight points are pruned
// internally; plan indices always refer to the original inputs. Unless orders
// are supplied, the initial basis is seeded from a principal-axis sort of
// both clouds, which is near-optimal for elongated or one-dimensional data.
W2LpResult w2_lp(const ParticleEnsemble& a, const ParticleEnsemble& b,
                 const TransportOptions& opts = {});

// Order-2 Wasserstein distance on the line through the quantile formula
//   W2^2 = integral over (0,1) of (Q_f - Q_g)^2.
// The unit interval is split at both distributions' quantile breakpoints;
// step-step pairs are summed exactly, other pieces integrate by Gauss-
// Legendre with node doubling and fall back to tanh-sinh where endpoint
// behavior (e.g. unbounded supports) defeats polynomial rules.
double w2_1d(const Cdf1D& f, const Cdf1D& g, double tol = 1e-10);

// Closed-form order-2 Wasserstein distance between Gaussians:
//   W2^2 = |mu1-mu2|^2 + tr(S1) + tr(S2) - 2 tr((S2^1/2 S1 S2^1/2)^1/2).
// Covariances must be symmetric PSD; eigenvalues in [-1e-10, 0) are treated
// as roundoff zeros, anything more negative throws.
double w2_gaussian(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1,
                   const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2);

// Inputs to the empirical-Wasserstein sample-count bound. The constants
// tci_constant (a transportation-cost-inequality curvature constant) and
// instants (number of compared snapshot instants) depend on the dynamics on
// both sides and must be supplied by the caller; they are never inferred.
struct SampleComplexityParams {
  double epsilon = 0.0;
  double delta = 0.0;
  double tci_constant = 1.0;  // must be > 0
  double instants = 1.0;      // must be >= 1
};

// Number of samples so that every empirical snapshot distance is within
// epsilon of its population value with probability at least 1 - delta,
// evaluated from (32 * tci_constant / epsilon^2) * log(2 * instants / delta)
// and rounded to the integer count (never below 1).
std::int64_t n_wass(const SampleComplexityParams& params);

// Marginal constraint matrix of the transport LP between an m-point and an
// n-point cloud, in standard form [e_n^T (x) I_m ; I_n (x) e_m^T] over the
// column-major vectorized plan: (m+n) x (m*n), binary, exactly 2mn nonzeros,
// every column holding exactly two ones.
Eigen::SparseMatrix<double> build_constraint_matrix(int m, int n);

}  // namespace wassval
