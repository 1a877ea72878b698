#include <Eigen/Core>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "wassval/core/numerics.hpp"
#include "wassval/densities/cdf.hpp"
#include "wassval/densities/ensemble.hpp"
#include "wassval/densities/family.hpp"
#include "wassval/densities/sampling.hpp"

using namespace wassval;

namespace {

DensityFamily gaussian1d(double mu, double var) {
  Gaussian g;
  g.mean = Eigen::VectorXd::Constant(1, mu);
  g.cov = Eigen::MatrixXd::Constant(1, 1, var);
  return g;
}

}  // namespace

TEST_CASE("raw moments of the closed-form families") {
  CHECK(raw_moment(gaussian1d(2.0, 9.0), 1) == doctest::Approx(2.0));
  CHECK(raw_moment(gaussian1d(2.0, 9.0), 2) == doctest::Approx(13.0));

  UniformBox u;
  u.lo = Eigen::VectorXd::Constant(1, -1.0);
  u.hi = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(raw_moment(DensityFamily{u}, 1) == doctest::Approx(0.5));
  CHECK(raw_moment(DensityFamily{u}, 2) == doctest::Approx(1.0));

  // Scaled Beta(2,3) on [-1,2]; reference values frozen from mpmath.
  const ScaledBeta sb{2.0, 3.0, -1.0, 2.0};
  CHECK(raw_moment(DensityFamily{sb}, 1) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(raw_moment(DensityFamily{sb}, 2) == doctest::Approx(0.4).epsilon(1e-14));

  // Arcsine == ScaledBeta(1/2, 1/2) moment for moment.
  const Arcsine ar{-3.0, 3.0};
  const ScaledBeta half{0.5, 0.5, -3.0, 3.0};
  for (int order : {1, 2}) {
    CHECK(raw_moment(DensityFamily{ar}, order) ==
          doctest::Approx(raw_moment(DensityFamily{half}, order)).epsilon(1e-14));
  }
  // Second moment of Arcsine[-a,a] is a^2/2.
  CHECK(raw_moment(DensityFamily{ar}, 2) == doctest::Approx(4.5).epsilon(1e-14));

  DiracMixture dm;
  dm.atoms.dim = 1;
  dm.atoms.coords = {-1.0, 0.5, 2.0};
  dm.atoms.weights = {0.25, 0.5, 0.25};
  CHECK(raw_moment(DensityFamily{dm}, 1) == doctest::Approx(0.5));
  CHECK(raw_moment(DensityFamily{dm}, 2) == doctest::Approx(1.375));
}

TEST_CASE("pdfs integrate to one") {
  // Beta(0.5, 2) has an integrable singularity at the left endpoint. The
  // support starts at 0 so quadrature nodes near it carry full precision.
  const ScaledBeta sb{0.5, 2.0, 0.0, 2.0};
  const auto f = make_pdf(DensityFamily{sb});
  const double mass = num::integrate_tanh_sinh(
      [&](double x) { return f(std::span<const double>(&x, 1)); }, 0.0, 2.0,
      1e-10);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));

  Gaussian g2;
  g2.mean = Eigen::VectorXd::Zero(2);
  g2.cov = Eigen::MatrixXd(2, 2);
  g2.cov << 2.0, 0.5, 0.5, 1.0;
  const auto p2 = make_pdf(DensityFamily{g2});
  const auto& q = num::gauss_legendre(64);
  double mass2 = 0.0;
  const double half = 10.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) {
    for (std::size_t j = 0; j < q.nodes.size(); ++j) {
      const double xy[2] = {half * q.nodes[i], half * q.nodes[j]};
      mass2 += half * half * q.weights[i] * q.weights[j] *
               p2(std::span<const double>(xy, 2));
    }
  }
  CHECK(mass2 == doctest::Approx(1.0).epsilon(1e-8));

  CHECK_THROWS(pdf(DensityFamily{Empirical{}}, std::span<const double>()));
}

TEST_CASE("beta entropy values and symmetry") {
  // Frozen from mpmath.
  CHECK(beta_entropy(2.0, 3.0) ==
        doctest::Approx(-0.23490664978800031).epsilon(1e-13));
  CHECK(beta_entropy(0.5, 0.5) ==
        doctest::Approx(-0.24156447527049044).epsilon(1e-13));
  CHECK(beta_entropy(1.0, 1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(beta_entropy(3.7, 1.9) == doctest::Approx(beta_entropy(1.9, 3.7)));
}

TEST_CASE("step cdf follows the infimum convention") {
  Cdf1D f = Cdf1D::step({2.0, 1.0, 3.0}, {0.3, 0.3, 0.4});
  CHECK(f.is_step());
  CHECK(f.cdf(0.99) == 0.0);
  CHECK(f.cdf(1.0) == doctest::Approx(0.3));
  CHECK(f.cdf(2.5) == doctest::Approx(0.6));
  CHECK(f.quantile(0.0) == 1.0);
  CHECK(f.quantile(0.3) == 1.0);  // plateau level maps to the left atom
  CHECK(f.quantile(0.3 + 1e-12) == 2.0);
  CHECK(f.quantile(1.0) == 3.0);
  REQUIRE(f.quantile_breakpoints().size() == 2);
  CHECK(f.quantile_breakpoints()[0] == doctest::Approx(0.3));
  CHECK(f.quantile_breakpoints()[1] == doctest::Approx(0.6));

  // Exact duplicates merge into one atom.
  Cdf1D d = Cdf1D::step({1.0, 1.0, 2.0}, {0.25, 0.25, 0.5});
  REQUIRE(d.atom_positions().size() == 2);
  CHECK(d.atom_cumulative()[0] == doctest::Approx(0.5));
  CHECK(d.atom_cumulative()[1] == 1.0);
}

TEST_CASE("piecewise-linear cdf inverts exactly") {
  Cdf1D f = Cdf1D::piecewise_linear({0.0, 1.0, 2.0}, {0.0, 0.25, 1.0});
  CHECK(f.quantile(0.125) == doctest::Approx(0.5));
  CHECK(f.quantile(0.25) == doctest::Approx(1.0));
  CHECK(f.quantile(0.625) == doctest::Approx(1.5));
  CHECK(f.cdf(0.5) == doctest::Approx(0.125));
  CHECK(f.cdf(1.5) == doctest::Approx(0.625));

  // Flat stretch (zero density): the quantile at the plateau level takes the
  // left end, just above it jumps across.
  Cdf1D g = Cdf1D::piecewise_linear({0.0, 1.0, 2.0, 3.0}, {0.0, 0.5, 0.5, 1.0});
  CHECK(g.quantile(0.5) == doctest::Approx(1.0));
  CHECK(g.quantile(0.5 + 1e-9) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(g.cdf(1.5) == doctest::Approx(0.5));
  REQUIRE(g.quantile_breakpoints().size() == 1);
}

TEST_CASE("analytic cdfs from families") {
  Cdf1D n01 = Cdf1D::from_family(gaussian1d(1.0, 4.0));
  CHECK(n01.cdf(1.0) == doctest::Approx(0.5));
  CHECK(n01.quantile(0.975) == doctest::Approx(1.0 + 2.0 * 1.9599639845400545)
                                   .epsilon(1e-12));
  CHECK(n01.has_unbounded_support());
  CHECK(n01.quantile_breakpoints().empty());

  const ScaledBeta sb{2.5, 1.5, 0.0, 1.0};
  Cdf1D fb = Cdf1D::from_family(DensityFamily{sb});
  CHECK(fb.cdf(0.3) == doctest::Approx(0.0889437231706656).epsilon(1e-11));
  CHECK(fb.quantile(fb.cdf(0.3)) == doctest::Approx(0.3).epsilon(1e-10));

  Cdf1D fa = Cdf1D::from_family(DensityFamily{Arcsine{-1.0, 1.0}});
  CHECK(fa.quantile(0.5) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(fa.cdf(0.0) == doctest::Approx(0.5));
  CHECK(fa.quantile(1.0) == doctest::Approx(1.0));

  Cdf1D q = Cdf1D::from_quantile([](double s) { return 2.0 * s; }, {0.5});
  CHECK(q.quantile(0.25) == 0.5);
  CHECK_THROWS(q.cdf(0.3));
  CHECK(q.quantile_breakpoints().size() == 1);
}

TEST_CASE("sampling is deterministic and hits the right law") {
  const DensityFamily beta = DensityFamily{ScaledBeta{2.0, 3.0, -1.0, 2.0}};
  const ParticleEnsemble s1 = sample(beta, 512, 99, SampleScheme::kPseudo);
  const ParticleEnsemble s2 = sample(beta, 512, 99, SampleScheme::kPseudo);
  REQUIRE(s1.size() == 512);
  CHECK(s1.coords == s2.coords);  // bit-identical reproducibility
  for (double x : s1.coords) {
    CHECK(x >= -1.0);
    CHECK(x <= 2.0);
  }

  // First Halton points in bases 2 and 3.
  UniformBox box;
  box.lo = Eigen::VectorXd::Zero(2);
  box.hi = Eigen::VectorXd::Ones(2);
  const ParticleEnsemble h = sample(DensityFamily{box}, 3, 0, SampleScheme::kHalton);
  CHECK(h.point(0)[0] == doctest::Approx(0.5));
  CHECK(h.point(0)[1] == doctest::Approx(1.0 / 3.0));
  CHECK(h.point(1)[0] == doctest::Approx(0.25));
  CHECK(h.point(1)[1] == doctest::Approx(2.0 / 3.0));
  CHECK(h.point(2)[0] == doctest::Approx(0.75));
  CHECK(h.point(2)[1] == doctest::Approx(1.0 / 9.0));

  // Sampled Gaussian covariance approaches the requested one.
  Gaussian g;
  g.mean = Eigen::VectorXd(2);
  g.mean << 1.0, -2.0;
  g.cov = Eigen::MatrixXd(2, 2);
  g.cov << 2.0, 0.8, 0.8, 1.0;
  const ParticleEnsemble gs = sample(DensityFamily{g}, 20000, 3, SampleScheme::kHalton);
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (std::int64_t i = 0; i < gs.size(); ++i) {
    mean += Eigen::Map<const Eigen::Vector2d>(gs.point(i).data());
  }
  mean /= static_cast<double>(gs.size());
  CHECK(mean[0] == doctest::Approx(1.0).epsilon(2e-3));
  CHECK(mean[1] == doctest::Approx(-2.0).epsilon(2e-3));
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  for (std::int64_t i = 0; i < gs.size(); ++i) {
    const Eigen::Vector2d c =
        Eigen::Map<const Eigen::Vector2d>(gs.point(i).data()) - mean;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(gs.size());
  CHECK(cov(0, 0) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(cov(0, 1) == doctest::Approx(0.8).epsilon(0.05));
  CHECK(cov(1, 1) == doctest::Approx(1.0).epsilon(0.02));

  // Dirac mixtures resample their own atoms with the right frequencies.
  DiracMixture dm;
  dm.atoms.dim = 1;
  dm.atoms.coords = {-1.0, 4.0};
  dm.atoms.weights = {0.75, 0.25};
  const ParticleEnsemble ds = sample(DensityFamily{dm}, 8000, 11, SampleScheme::kPseudo);
  std::int64_t at_four = 0;
  for (std::int64_t i = 0; i < ds.size(); ++i) {
    const double x = ds.point(i)[0];
    REQUIRE((x == -1.0 || x == 4.0));
    if (x == 4.0) ++at_four;
  }
  CHECK(static_cast<double>(at_four) / 8000.0 == doctest::Approx(0.25).epsilon(0.08));

  CHECK_THROWS(sample(DensityFamily{Empirical{}}, 10, 0, SampleScheme::kPseudo));
}

TEST_CASE("ensemble weight normalization") {
  ParticleEnsemble e;
  e.dim = 1;
  e.coords = {0.0, 1.0, 2.0};
  e.weights = {1.0, 1.0, 2.0};
  normalize_weights(e);
  CHECK(e.weights[2] == doctest::Approx(0.5));

  ParticleEnsemble bad = e;
  bad.weights[0] = -0.1;
  CHECK_THROWS(normalize_weights(bad));
}
