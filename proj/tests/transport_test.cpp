#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "wassval/core/rng.hpp"
#include "wassval/densities/cdf.hpp"
#include "wassval/densities/ensemble.hpp"
#include "wassval/transport/wasserstein.hpp"

using namespace wassval;

namespace {

ParticleEnsemble random_cloud(Rng& rng, std::int64_t n, int dim,
                              bool random_weights) {
  ParticleEnsemble e;
  e.dim = dim;
  e.coords.resize(static_cast<std::size_t>(n * dim));
  for (double& c : e.coords) c = rng.next_uniform(-2.0, 2.0);
  e.weights.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (double& w : e.weights) {
    w = random_weights ? rng.next_uniform(0.05, 1.0) : 1.0;
    total += w;
  }
  for (double& w : e.weights) w /= total;
  return e;
}

double sq_dist(const ParticleEnsemble& a, std::int64_t i,
               const ParticleEnsemble& b, std::int64_t j) {
  double acc = 0.0;
  for (int k = 0; k < a.dim; ++k) {
    const double d = a.point(i)[static_cast<std::size_t>(k)] -
                     b.point(j)[static_cast<std::size_t>(k)];
    acc += d * d;
  }
  return acc;
}

// Independent oracle for uniform weights: the optimum over the Birkhoff
// polytope is attained at a permutation, so enumerate all of them.
double assignment_oracle(const ParticleEnsemble& a, const ParticleEnsemble& b) {
  const std::int64_t n = a.size();
  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), std::int64_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      cost += sq_dist(a, i, b, perm[static_cast<std::size_t>(i)]);
    }
    best = std::min(best, cost / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void check_plan_is_coupling(const W2LpResult& res, const ParticleEnsemble& a,
                            const ParticleEnsemble& b, double tol) {
  std::vector<double> row(static_cast<std::size_t>(a.size()), 0.0);
  std::vector<double> col(static_cast<std::size_t>(b.size()), 0.0);
  for (const TransportPlanEntry& e : res.plan) {
    REQUIRE(e.i >= 0);
    REQUIRE(e.i < a.size());
    REQUIRE(e.j >= 0);
    REQUIRE(e.j < b.size());
    REQUIRE(e.mass > 0.0);
    row[static_cast<std::size_t>(e.i)] += e.mass;
    col[static_cast<std::size_t>(e.j)] += e.mass;
  }
  for (std::int64_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(row[static_cast<std::size_t>(i)] -
                   a.weights[static_cast<std::size_t>(i)]) < tol);
  }
  for (std::int64_t j = 0; j < b.size(); ++j) {
    CHECK(std::abs(col[static_cast<std::size_t>(j)] -
                   b.weights[static_cast<std::size_t>(j)]) < tol);
  }
  CHECK(res.plan.size() <=
        static_cast<std::size_t>(a.size() + b.size() - 1));
}

}  // namespace

TEST_CASE("lp optimum matches exhaustive assignment enumeration") {
  Rng rng(1234);
  for (int rep = 0; rep < 12; ++rep) {
    const std::int64_t n = 2 + static_cast<std::int64_t>(rng.next_u64() % 5);
    const int dim = 1 + static_cast<int>(rng.next_u64() % 3);
    const ParticleEnsemble a = random_cloud(rng, n, dim, false);
    const ParticleEnsemble b = random_cloud(rng, n, dim, false);
    const W2LpResult res = w2_lp(a, b);
    const double oracle = assignment_oracle(a, b);
    CHECK(res.cost == doctest::Approx(oracle).epsilon(1e-12));
    check_plan_is_coupling(res, a, b, 1e-12);
  }
}

TEST_CASE("lp agrees with the quantile formula on the line") {
  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    const std::int64_t m = 3 + static_cast<std::int64_t>(rng.next_u64() % 40);
    const std::int64_t n = 3 + static_cast<std::int64_t>(rng.next_u64() % 40);
    const ParticleEnsemble a = random_cloud(rng, m, 1, true);
    const ParticleEnsemble b = random_cloud(rng, n, 1, true);
    const W2LpResult res = w2_lp(a, b);
    const double oracle =
        w2_1d(Cdf1D::from_ensemble(a), Cdf1D::from_ensemble(b));
    CHECK(res.distance == doctest::Approx(oracle).epsilon(1e-11));
    check_plan_is_coupling(res, a, b, 1e-12);
  }
  // Pre-sorted one-dimensional data: the northwest-corner warm start is the
  // monotone coupling, already optimal.
  const ParticleEnsemble a = random_cloud(rng, 50, 1, false);
  const ParticleEnsemble b = random_cloud(rng, 50, 1, false);
  CHECK(w2_lp(a, b).pivots == 0);
}

TEST_CASE("explicit cost matrix instance solved by hand") {
  const std::vector<double> supply{0.5, 0.5};
  const std::vector<double> demand{0.5, 0.5};
  const std::vector<double> cost{1.0, 2.0, 3.0, 0.5};
  const TransportResult res = solve_transport_matrix(supply, demand, cost);
  CHECK(res.cost == doctest::Approx(0.75).epsilon(1e-14));
  REQUIRE(res.plan.size() == 2);
  CHECK(res.plan[0].i == 0);
  CHECK(res.plan[0].j == 0);
  CHECK(res.plan[0].mass == doctest::Approx(0.5));
  CHECK(res.plan[1].i == 1);
  CHECK(res.plan[1].j == 1);
}

TEST_CASE("metric axioms hold for the lp distance") {
  Rng rng(5150);
  for (int rep = 0; rep < 5; ++rep) {
    const ParticleEnsemble a = random_cloud(rng, 12, 2, true);
    const ParticleEnsemble b = random_cloud(rng, 9, 2, true);
    const ParticleEnsemble c = random_cloud(rng, 15, 2, true);
    const double ab = w2_lp(a, b).distance;
    const double ba = w2_lp(b, a).distance;
    const double ac = w2_lp(a, c).distance;
    const double bc = w2_lp(b, c).distance;
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ac <= ab + bc + 1e-12);
    CHECK(w2_lp(a, a).distance == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("degenerate uniform grids") {
  // Identical equally spaced grids shifted by half a step: the optimal move
  // is the shift itself, so W2 equals it exactly.
  const std::int64_t n = 200;
  ParticleEnsemble a, b;
  a.dim = b.dim = 1;
  for (std::int64_t i = 0; i < n; ++i) {
    a.coords.push_back(static_cast<double>(i) / static_cast<double>(n));
    b.coords.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  a.weights.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
  b.weights = a.weights;
  const W2LpResult res = w2_lp(a, b);
  CHECK(res.distance == doctest::Approx(0.5 / static_cast<double>(n)).epsilon(1e-12));
  CHECK(w2_lp(a, a).distance == 0.0);
}

TEST_CASE("gaussian closed form") {
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(1), m2 = Eigen::VectorXd::Zero(1);
  m2[0] = 2.0;
  Eigen::MatrixXd c1 = Eigen::MatrixXd::Identity(1, 1);
  Eigen::MatrixXd c2 = Eigen::MatrixXd::Identity(1, 1) * 9.0;
  // One dimension: W2^2 = (mu1-mu2)^2 + (sigma1-sigma2)^2 = 4 + 4.
  CHECK(w2_gaussian(m1, c1, m2, c2) ==
        doctest::Approx(std::sqrt(8.0)).epsilon(1e-13));

  // Same quantity through the quantile formula.
  Gaussian ga;
  ga.mean = m1;
  ga.cov = c1;
  Gaussian gb;
  gb.mean = m2;
  gb.cov = c2;
  const double via_quantiles = w2_1d(Cdf1D::from_family(DensityFamily{ga}),
                                     Cdf1D::from_family(DensityFamily{gb}));
  CHECK(via_quantiles == doctest::Approx(std::sqrt(8.0)).epsilon(1e-9));

  // Equal covariances: the distance reduces to the mean gap exactly.
  Eigen::VectorXd mu1(3), mu2(3);
  mu1 << 1.0, -2.0, 0.5;
  mu2 << -1.0, 0.0, 2.5;
  Eigen::MatrixXd cov(3, 3);
  cov << 2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0;
  CHECK(w2_gaussian(mu1, cov, mu2, cov) ==
        doctest::Approx((mu1 - mu2).norm()).epsilon(1e-12));

  // Commuting (diagonal) covariances: sum of per-axis (sqrt-eigenvalue gaps)^2.
  Eigen::MatrixXd d1 = Eigen::Vector2d(1.0, 4.0).asDiagonal();
  Eigen::MatrixXd d2 = Eigen::Vector2d(9.0, 1.0).asDiagonal();
  const double expect =
      std::sqrt((1.0 - 3.0) * (1.0 - 3.0) + (2.0 - 1.0) * (2.0 - 1.0));
  CHECK(w2_gaussian(Eigen::VectorXd::Zero(2), d1, Eigen::VectorXd::Zero(2), d2) ==
        doctest::Approx(expect).epsilon(1e-13));

  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.0, -0.5;
  CHECK_THROWS(w2_gaussian(Eigen::VectorXd::Zero(2), bad,
                           Eigen::VectorXd::Zero(2), d2));
}

TEST_CASE("quantile-formula distances with frozen references") {
  // Arcsine[-1,1] vs Uniform[-1,1]: W2^2 = 5/6 - 8/pi^2 (mpmath-checked).
  const double w = w2_1d(Cdf1D::from_family(DensityFamily{Arcsine{-1.0, 1.0}}),
                         Cdf1D::from_family(DensityFamily{UniformBox{
                             Eigen::VectorXd::Constant(1, -1.0),
                             Eigen::VectorXd::Constant(1, 1.0)}}));
  CHECK(w == doctest::Approx(0.15087698364770937).epsilon(1e-10));

  // Piecewise-linear cdf {0,1,2}/{0,.25,1} vs Uniform[0,2]: W2^2 = 1/12 by
  // direct integration of the two quantiles.
  Cdf1D pl = Cdf1D::piecewise_linear({0.0, 1.0, 2.0}, {0.0, 0.25, 1.0});
  Cdf1D u = Cdf1D::from_family(DensityFamily{UniformBox{
      Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 2.0)}});
  CHECK(w2_1d(pl, u) ==
        doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-10));

  // Identical distributions with atoms.
  Cdf1D s = Cdf1D::step({0.0, 1.0, 5.0}, {0.2, 0.5, 0.3});
  CHECK(w2_1d(s, s) == 0.0);
}

TEST_CASE("sample-count bound for empirical transport estimates") {
  SUBCASE("worked values") {
    CHECK(n_wass({0.1, 0.05, 1.0, 1.0}) == 11804);
    // Exponents collapse: delta = 2K/e makes the log factor exactly 1, and
    // tci_constant = 1/32 cancels the prefactor.
    CHECK(n_wass({1.0, 2.0 / std::exp(1.0), 1.0 / 32.0, 1.0}) == 1);
  }
  SUBCASE("halving epsilon quadruples the pre-rounding bound") {
    const std::int64_t coarse = n_wass({0.2, 0.1, 0.7, 3.0});
    const std::int64_t fine = n_wass({0.1, 0.1, 0.7, 3.0});
    CHECK(fine >= 4 * coarse);
    CHECK(fine <= 4 * coarse + 3);
  }
  SUBCASE("count never drops below one") {
    CHECK(n_wass({5.0, 1.9, 1e-3, 1.0}) == 1);
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(n_wass({0.0, 0.05, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(n_wass({0.1, 0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(n_wass({0.1, 2.5, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(n_wass({0.1, 0.05, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(n_wass({0.1, 0.05, 1.0, 0.5}), std::invalid_argument);
  }
}

TEST_CASE("marginal constraint matrix structure") {
  SUBCASE("two by two expansion") {
    const Eigen::MatrixXd a =
        Eigen::MatrixXd(build_constraint_matrix(2, 2));
    Eigen::MatrixXd expect(4, 4);
    expect << 1, 0, 1, 0,
              0, 1, 0, 1,
              1, 1, 0, 0,
              0, 0, 1, 1;
    CHECK((a - expect).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("single source, five targets") {
    const auto a = build_constraint_matrix(1, 5);
    CHECK(a.rows() == 6);
    CHECK(a.cols() == 5);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(a);
    for (int j = 0; j < 5; ++j) CHECK(dense.col(j).sum() == 2.0);
  }
  SUBCASE("random shape: sparsity and plan feasibility") {
    const int m = 4, n = 7;
    const auto a = build_constraint_matrix(m, n);
    CHECK(a.nonZeros() == 2 * m * n);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(a);
    for (int j = 0; j < m * n; ++j) {
      CHECK(dense.col(j).sum() == 2.0);
      CHECK(dense.col(j).maxCoeff() == 1.0);
    }
    // Applying the matrix to a vectorized optimal plan must reproduce both
    // marginals exactly.
    Rng rng(31);
    const auto ea = random_cloud(rng, m, 2, true);
    const auto eb = random_cloud(rng, n, 2, true);
    const auto res = w2_lp(ea, eb, {});
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m * n);
    for (const auto& entry : res.plan) {
      x[static_cast<int>(entry.j) * m + static_cast<int>(entry.i)] +=
          entry.mass;
    }
    const Eigen::VectorXd marginals = a * x;
    for (int i = 0; i < m; ++i) {
      CHECK(marginals[i] ==
            doctest::Approx(ea.weights[static_cast<std::size_t>(i)])
                .epsilon(1e-12));
    }
    for (int j = 0; j < n; ++j) {
      CHECK(marginals[m + j] ==
            doctest::Approx(eb.weights[static_cast<std::size_t>(j)])
                .epsilon(1e-12));
    }
  }
}
