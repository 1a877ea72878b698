#include "wassval/transport/wasserstein.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wassval/core/numerics.hpp"

namespace wassval {

namespace {

struct Pruned {
  std::vector<double> weights;
  std::vector<double> coords;
  std::vector<std::int64_t> original;  // pruned index -> input index
};

Pruned prune_zero_weights(const ParticleEnsemble& e) {
  double total = 0.0;
  for (double w : e.weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("w2_lp: weights must be finite and >= 0");
    }
    total += w;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("w2_lp: ensemble has zero total mass");
  }
  Pruned out;
  for (std::int64_t i = 0; i < e.size(); ++i) {
    const double w = e.weights[static_cast<std::size_t>(i)];
    if (w == 0.0) continue;
    out.weights.push_back(w / total);
    const auto pt = e.point(i);
    out.coords.insert(out.coords.end(), pt.begin(), pt.end());
    out.original.push_back(i);
  }
  return out;
}

// Projection of every point onto the leading principal axis of the pooled
// cloud, then an index sort. Feeding these orders to the northwest-corner
// rule yields a near-monotone (often already optimal) starting basis.
void principal_axis_orders(const Pruned& a, const Pruned& b, int dim,
                           std::vector<std::int64_t>& row_order,
                           std::vector<std::int64_t>& col_order) {
  const std::int64_t na = static_cast<std::int64_t>(a.weights.size());
  const std::int64_t nb = static_cast<std::int64_t>(b.weights.size());
  Eigen::VectorXd axis = Eigen::VectorXd::Zero(dim);
  if (dim == 1) {
    axis[0] = 1.0;
  } else {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (std::int64_t i = 0; i < na; ++i) {
      mean += Eigen::Map<const Eigen::VectorXd>(a.coords.data() + i * dim, dim);
    }
    for (std::int64_t j = 0; j < nb; ++j) {
      mean += Eigen::Map<const Eigen::VectorXd>(b.coords.data() + j * dim, dim);
    }
    mean /= static_cast<double>(na + nb);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(dim, dim);
    for (std::int64_t i = 0; i < na; ++i) {
      const Eigen::VectorXd c =
          Eigen::Map<const Eigen::VectorXd>(a.coords.data() + i * dim, dim) -
          mean;
      scatter += c * c.transpose();
    }
    for (std::int64_t j = 0; j < nb; ++j) {
      const Eigen::VectorXd c =
          Eigen::Map<const Eigen::VectorXd>(b.coords.data() + j * dim, dim) -
          mean;
      scatter += c * c.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scatter);
    axis = es.eigenvectors().col(dim - 1);  // largest eigenvalue is last
  }

  const auto sorted_by_projection = [&](const std::vector<double>& coords,
                                        std::int64_t n) {
    std::vector<double> proj(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
      proj[static_cast<std::size_t>(i)] =
          axis.dot(Eigen::Map<const Eigen::VectorXd>(coords.data() + i * dim, dim));
    }
    std::vector<std::int64_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::int64_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::int64_t x, std::int64_t y) {
                       return proj[static_cast<std::size_t>(x)] <
                              proj[static_cast<std::size_t>(y)];
                     });
    return order;
  };
  row_order = sorted_by_projection(a.coords, na);
  col_order = sorted_by_projection(b.coords, nb);
}

}  // namespace

W2LpResult w2_lp(const ParticleEnsemble& a, const ParticleEnsemble& b,
                 const TransportOptions& opts) {
  if (a.dim != b.dim || a.dim <= 0) {
    throw std::invalid_argument("w2_lp: dimension mismatch");
  }
  const int dim = a.dim;
  const Pruned pa = prune_zero_weights(a);
  const Pruned pb = prune_zero_weights(b);

  TransportOptions solver_opts = opts;
  if (solver_opts.row_order.empty() && solver_opts.col_order.empty()) {
    principal_axis_orders(pa, pb, dim, solver_opts.row_order,
                          solver_opts.col_order);
  }

  const double* xa = pa.coords.data();
  const double* xb = pb.coords.data();
  const auto sq_dist = [xa, xb, dim](std::int64_t i, std::int64_t j) {
    const double* p = xa + i * dim;
    const double* q = xb + j * dim;
    double acc = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double d = p[k] - q[k];
      acc += d * d;
    }
    return acc;
  };

  TransportResult res =
      solve_transport(std::span<const double>(pa.weights),
                      std::span<const double>(pb.weights), sq_dist, solver_opts);

  W2LpResult out;
  out.cost = std::max(res.cost, 0.0);
  out.distance = std::sqrt(out.cost);
  out.pivots = res.pivots;
  out.plan.reserve(res.plan.size());
  for (const TransportPlanEntry& e : res.plan) {
    out.plan.push_back(
        TransportPlanEntry{pa.original[static_cast<std::size_t>(e.i)],
                           pb.original[static_cast<std::size_t>(e.j)], e.mass});
  }
  std::sort(out.plan.begin(), out.plan.end(),
            [](const TransportPlanEntry& u, const TransportPlanEntry& v) {
              return u.i != v.i ? u.i < v.i : u.j < v.j;
            });
  return out;
}

double w2_1d(const Cdf1D& f, const Cdf1D& g, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("w2_1d: tolerance must be positive");
  }
  // Split (0,1) wherever either quantile jumps or kinks.
  std::vector<double> knots;
  knots.push_back(0.0);
  knots.insert(knots.end(), f.quantile_breakpoints().begin(),
               f.quantile_breakpoints().end());
  knots.insert(knots.end(), g.quantile_breakpoints().begin(),
               g.quantile_breakpoints().end());
  knots.push_back(1.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  if (f.is_step() && g.is_step()) {
    // Both quantiles are piecewise constant between knots: the integral is
    // an exact finite sum over the merged partition.
    std::vector<double> terms;
    terms.reserve(knots.size());
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      const double len = knots[k + 1] - knots[k];
      if (len <= 0.0) continue;
      const double s_mid = knots[k] + 0.5 * len;
      const double d = f.quantile(s_mid) - g.quantile(s_mid);
      terms.push_back(d * d * len);
    }
    return std::sqrt(std::max(num::kahan_sum(terms), 0.0));
  }

  const auto integrand = [&f, &g](double s) {
    const double d = f.quantile(s) - g.quantile(s);
    return d * d;
  };
  std::vector<double> pieces;
  pieces.reserve(knots.size());
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double s0 = knots[k], s1 = knots[k + 1];
    if (!(s1 > s0)) continue;
    double achieved = 0.0;
    const double gl =
        num::integrate_gl_doubling(integrand, s0, s1, 16, 0.0, &achieved);
    const double piece_tol = tol * std::max(s1 - s0, 1e-3);
    if (achieved <= piece_tol) {
      pieces.push_back(gl);
    } else {
      // Endpoint singularity (unbounded support) or a missed kink: switch to
      // a rule that tolerates both.
      pieces.push_back(num::integrate_tanh_sinh(integrand, s0, s1,
                                                std::max(tol, 1e-13)));
    }
  }
  return std::sqrt(std::max(num::kahan_sum(pieces), 0.0));
}

double w2_gaussian(const Eigen::VectorXd& mean1, const Eigen::MatrixXd& cov1,
                   const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2) {
  const auto d = mean1.size();
  if (mean2.size() != d || cov1.rows() != d || cov1.cols() != d ||
      cov2.rows() != d || cov2.cols() != d) {
    throw std::invalid_argument("w2_gaussian: shape mismatch");
  }
  const auto check_symmetric = [](const Eigen::MatrixXd& s) {
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
      throw std::invalid_argument("w2_gaussian: covariance not symmetric");
    }
  };
  check_symmetric(cov1);
  check_symmetric(cov2);
  const Eigen::MatrixXd s1 = 0.5 * (cov1 + cov1.transpose());
  const Eigen::MatrixXd s2 = 0.5 * (cov2 + cov2.transpose());

  // Identical inputs are exactly zero distance; the trace expression below
  // would instead return eigensolver noise, which for ill-conditioned
  // covariances (condition ~1e12 and beyond) can reach ~1e-6.
  if (mean1 == mean2 && s1 == s2) return 0.0;

  // Eigenvalues in [-1e-10, 0) count as roundoff zeros.
  const auto clamped_eigs = [](const Eigen::VectorXd& lambda,
                               const char* what) {
    Eigen::VectorXd out = lambda;
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      if (out[i] < -1e-10) {
        throw std::invalid_argument(std::string("w2_gaussian: ") + what +
                                    " has a negative eigenvalue");
      }
      out[i] = std::max(out[i], 0.0);
    }
    return out;
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2(s2);
  if (es2.info() != Eigen::Success) {
    throw std::runtime_error("w2_gaussian: eigendecomposition failed");
  }
  const Eigen::VectorXd l2 = clamped_eigs(es2.eigenvalues(), "cov2");
  const Eigen::MatrixXd root2 = es2.eigenvectors() *
                                l2.cwiseSqrt().asDiagonal() *
                                es2.eigenvectors().transpose();

  Eigen::MatrixXd inner = root2 * s1 * root2;
  inner = 0.5 * (inner + inner.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esm(inner);
  if (esm.info() != Eigen::Success) {
    throw std::runtime_error("w2_gaussian: eigendecomposition failed");
  }
  const Eigen::VectorXd lm = clamped_eigs(esm.eigenvalues(), "cross term");

  const double cross = 2.0 * lm.cwiseSqrt().sum();
  // The covariance part cancels to eigensolver roundoff when the two
  // covariances nearly coincide; left alone that residue resurfaces as a
  // phantom distance of order sqrt(eps) after the square root, so anything
  // below the roundoff scale of the traces is treated as an exact zero.
  double bures_sq = s1.trace() + s2.trace() - cross;
  if (bures_sq < 1e-12 * (s1.trace() + s2.trace())) {
    bures_sq = 0.0;
  }
  const double sq = (mean1 - mean2).squaredNorm() + bures_sq;
  return std::sqrt(std::max(sq, 0.0));
}

std::int64_t n_wass(const SampleComplexityParams& params) {
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    throw std::invalid_argument("n_wass: epsilon must be positive and finite");
  }
  if (!(params.tci_constant > 0.0) || !std::isfinite(params.tci_constant)) {
    throw std::invalid_argument("n_wass: tci_constant must be positive");
  }
  if (!(params.instants >= 1.0) || !std::isfinite(params.instants)) {
    throw std::invalid_argument("n_wass: instants must be at least 1");
  }
  if (!(params.delta > 0.0) || !(params.delta < 2.0 * params.instants)) {
    throw std::invalid_argument(
        "n_wass: delta must lie in (0, 2 * instants)");
  }
  const double raw = 32.0 * params.tci_constant /
                     (params.epsilon * params.epsilon) *
                     std::log(2.0 * params.instants / params.delta);
  const double count = std::floor(raw + 1e-9);
  return count < 1.0 ? 1 : static_cast<std::int64_t>(count);
}

Eigen::SparseMatrix<double> build_constraint_matrix(int m, int n) {
  if (m < 1 || n < 1) {
    throw std::invalid_argument(
        "build_constraint_matrix: both sides need at least one point");
  }
  Eigen::SparseMatrix<double> a(m + n, static_cast<Eigen::Index>(m) * n);
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(2) * m * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      const int col = j * m + i;
      entries.emplace_back(i, col, 1.0);      // source-marginal row i
      entries.emplace_back(m + j, col, 1.0);  // target-marginal row j
    }
  }
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

}  // namespace wassval
