#pragma once

#include <functional>
#include <vector>

#include "wassval/densities/family.hpp"

namespace wassval {

// One-dimensional distribution viewed through its CDF and quantile function.
// Three concrete shapes share the interface:
//   * analytic  -- smooth closed-form F and Q (Gaussian, beta, ...);
//   * step      -- finite atom list (empirical / Dirac mixtures);
//   * piecewise -- CDF linear between grid nodes (piecewise-constant density).
// A fourth, quantile-only shape carries pushforwards Q_t = flow o Q_0 where no
// closed-form CDF exists; cdf() throws for it.
//
// Quantile convention: Q(s) = inf { x : F(x) >= s }. On a step plateau this
// picks the left atom, and Q(0) is the infimum of the support.
class Cdf1D {
 public:
  using RealFn = std::function<double(double)>;

  static Cdf1D analytic(RealFn cdf, RealFn quantile, double support_lo,
                        double support_hi);
  // Atoms are sorted and exact duplicates merged; zero weights are dropped.
  static Cdf1D step(std::vector<double> positions, std::vector<double> weights);
  // Nodes with nondecreasing cumulative values; cum.front() == 0 and
  // cum.back() == 1 after an internal rescale (tolerance 1e-9).
  static Cdf1D piecewise_linear(std::vector<double> positions,
                                std::vector<double> cum);
  static Cdf1D from_quantile(RealFn quantile,
                             std::vector<double> breakpoints = {});
  static Cdf1D from_family(const DensityFamily& family);
  static Cdf1D from_ensemble(const ParticleEnsemble& ensemble);

  double cdf(double x) const;
  double quantile(double s) const;

  // Interior levels in (0, 1) where the quantile jumps or kinks; sorted and
  // deduplicated. Smooth analytic shapes report none.
  const std::vector<double>& quantile_breakpoints() const {
    return breakpoints_;
  }

  bool has_cdf() const { return kind_ != Kind::QuantileOnly; }
  bool is_step() const { return kind_ == Kind::Step; }
  bool has_unbounded_support() const;

  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  // Step-shape accessors (throw otherwise).
  const std::vector<double>& atom_positions() const;
  const std::vector<double>& atom_cumulative() const;

 private:
  enum class Kind { Analytic, Step, PiecewiseLinear, QuantileOnly };

  Cdf1D() = default;

  Kind kind_ = Kind::Analytic;
  RealFn cdf_fn_;
  RealFn quantile_fn_;
  std::vector<double> xs_;
  std::vector<double> cum_;
  std::vector<double> breakpoints_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

}  // namespace wassval
