#pragma once

#include <functional>
#include <span>
#include <vector>

// Special functions and quadrature shared across the library. Everything here
// is deterministic and thread-safe; accuracy targets are stated per function
// because downstream tolerances (1e-6 .. 1e-12) lean on them.
namespace wassval::num {

// Digamma Ψ(x) for x > 0, relative error ≤ 1e-12 (upward recurrence into the
// asymptotic series region).
double digamma(double x);

// log B(a,b) for a, b > 0.
double log_beta(double a, double b);

// Regularized incomplete beta I_x(a,b), x ∈ [0,1], by continued fraction.
double reg_inc_beta(double a, double b, double x);

// Inverse of I_x(a,b) in x for p ∈ [0,1]; log-space Newton with a bracket
// safeguard, |I(x) - p| driven below ~1e-13 relative even deep in the tails.
double reg_inc_beta_inv(double a, double b, double p);

// Unnormalized incomplete beta integral ∫₀ˣ v^(a-1) (1-v)^(b-1) dv.
double inc_beta_unnormalized(double a, double b, double x);

// Standard normal CDF / quantile / density. Quantile is full double-precision
// (rational approximation + one residual polish step).
double normal_cdf(double x);
double normal_quantile(double p);
double normal_pdf(double x);

// Inverse error function on (-1,1).
double erf_inv(double y);

// Gauss hypergeometric ₂F₁(a,b;c;z) by power series for |z| < 1 (tolerance
// 1e-12 on the term ratio, hard cap 1e5 terms -> throws on non-convergence);
// z = 1 uses the Gauss closed form, valid for c-a-b > 0.
double hyp2f1(double a, double b, double c, double z);

// Gauss–Legendre rule on [-1,1]; nodes/weights cached per n.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const Quadrature& gauss_legendre(int n);

// ∫_a^b f dx with an n-node Gauss–Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n);

// Gauss–Legendre with a node-doubling convergence check: integrates at n and
// 2n nodes, reports |difference| through *achieved_tol if non-null, and throws
// if it exceeds tol and no out-parameter was supplied.
double integrate_gl_doubling(const std::function<double(double)>& f, double a,
                             double b, int n, double tol,
                             double* achieved_tol = nullptr);

// Tanh–sinh (double-exponential) quadrature on (a,b): handles integrable
// endpoint singularities. f is never evaluated at a or b exactly.
double integrate_tanh_sinh(const std::function<double(double)>& f, double a,
                           double b, double tol);

// Compensated (Kahan) summation.
double kahan_sum(std::span<const double> values);

}  // namespace wassval::num
