#pragma once

namespace wassval {

// Order-2 Wasserstein distance between the mirrored beta densities with
// parameters (alpha, beta) and (beta, alpha) on [0, 1], by the closed form
//   W2^2 = (alpha(alpha+1) + beta(beta+1)) / ((alpha+beta)(alpha+beta+1))
//        - 2 (beta/(alpha+beta) - J),
// where J is the cross-quantile integral evaluated by quadrature. Symmetric
// in (alpha, beta) and zero iff alpha == beta. Requires alpha, beta > 0.
double beta_beta_w2(double alpha, double beta);

// The J integral itself:
//   J = 1/(beta+1) * integral over t in (0,1) of
//       f^{1-alpha} (1-f)^{1-beta} g^{beta+1}
//         * 2F1(beta+1, 1-alpha; beta+2; g) dt,
// with f = I_t^{-1}(alpha, beta), g = I_t^{-1}(beta, alpha) the two inverse
// regularized incomplete beta functions. Evaluated after substituting x = g
// and splitting at 1/2 with the upper half reflected, so both integrable
// endpoint singularities sit at coordinate zero where the quadrature nodes
// stay well separated; the hypergeometric factor uses its power series for
// arguments <= 3/4 and the equivalent incomplete-beta form beyond, where
// the series needs more terms than the cap as the argument approaches 1.
double beta_cross_quantile_integral(double alpha, double beta);

// Quadrature of the squared inverse-CDF moment
//   integral over t in (0,1) of (I_t^{-1}(alpha, beta))^2 dt,
// which has the closed-form value alpha(alpha+1)/((alpha+beta)(alpha+beta+1)).
// Exposed so the quantile evaluator can be validated against that identity.
double beta_inverse_square_moment(double alpha, double beta);

// (x^{b+1}/(b+1)) * 2F1(b+1, 1-a; b+2; x) for x in [0, 1) and a, b > 0 --
// equal to the unnormalized incomplete beta integral of x^b (1-x)^{a-1}.
// Series for x <= 3/4, incomplete-beta continued fraction beyond.
double scaled_hyp_incomplete_beta(double a, double b, double x);

}  // namespace wassval
