#include "wassval/transport/asymptotic.hpp"

#include <Eigen/Eigenvalues>
#include <stdexcept>
#include <string>

#include "wassval/dynamics/stationary.hpp"
#include "wassval/transport/wasserstein.hpp"

namespace wassval {

namespace {

bool is_hurwitz(const Eigen::MatrixXd& a) {
  const Eigen::EigenSolver<Eigen::MatrixXd> es(a);
  return es.eigenvalues().real().maxCoeff() < 0.0;
}

void require_square(const Eigen::MatrixXd& a, const char* name) {
  if (a.rows() == 0 || a.rows() != a.cols()) {
    throw std::invalid_argument(std::string("asymptotic_gap: ") + name +
                                " must be square and nonempty");
  }
}

void require_hurwitz(const Eigen::MatrixXd& a, const char* name) {
  require_square(a, name);
  if (!is_hurwitz(a)) {
    throw std::invalid_argument(std::string("asymptotic_gap: ") + name +
                                " is not Hurwitz");
  }
}

void require_output_map(const Eigen::MatrixXd& c, Eigen::Index state_dim,
                        const char* name) {
  if (c.rows() == 0 || c.cols() != state_dim) {
    throw std::invalid_argument(std::string("asymptotic_gap: ") + name +
                                " has incompatible dimensions");
  }
}

double gap_deterministic_linear(const DeterministicLinearGapCase& g) {
  require_hurwitz(g.a, "A");
  require_hurwitz(g.a_hat, "A_hat");
  require_output_map(g.c, g.a.rows(), "C");
  require_output_map(g.c_hat, g.a_hat.rows(), "C_hat");
  if (g.c.rows() != g.c_hat.rows()) {
    throw std::invalid_argument("asymptotic_gap: output dimensions differ");
  }
  return 0.0;
}

// Stationary output point of dx/dt = A x + b, y = C x + d.
Eigen::VectorXd affine_limit(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                             const Eigen::MatrixXd& c,
                             const Eigen::VectorXd& d) {
  require_square(a, "A");
  if (b.size() != a.rows() || d.size() != c.rows()) {
    throw std::invalid_argument("asymptotic_gap: affine term size mismatch");
  }
  require_output_map(c, a.rows(), "C");
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) {
    throw std::invalid_argument(
        "asymptotic_gap: singular A in the affine case");
  }
  if (!is_hurwitz(a)) {
    throw std::invalid_argument("asymptotic_gap: A is not Hurwitz");
  }
  return d - c * lu.solve(b);
}

double gap_affine(const AffineGapCase& g) {
  const Eigen::VectorXd y = affine_limit(g.a, g.b, g.c, g.d);
  const Eigen::VectorXd y_hat =
      affine_limit(g.a_hat, g.b_hat, g.c_hat, g.d_hat);
  if (y.size() != y_hat.size()) {
    throw std::invalid_argument("asymptotic_gap: output dimensions differ");
  }
  return (y - y_hat).norm();
}

Eigen::MatrixXd stationary_output_cov(const Eigen::MatrixXd& a,
                                      const Eigen::MatrixXd& b,
                                      const Eigen::VectorXd& q,
                                      const Eigen::MatrixXd& c) {
  require_square(a, "A");
  require_output_map(c, a.rows(), "C");
  if (b.rows() != a.rows() || b.cols() != q.size() || q.size() == 0) {
    throw std::invalid_argument("asymptotic_gap: noise coupling size mismatch");
  }
  if (q.minCoeff() <= 0.0) {
    throw std::invalid_argument("asymptotic_gap: noise rates must be positive");
  }
  if (!is_hurwitz(a)) {
    throw std::invalid_argument(
        "asymptotic_gap: non-Hurwitz matrix in the stochastic case");
  }
  const Eigen::MatrixXd s =
      solve_continuous_lyapunov(a, b * q.asDiagonal() * b.transpose());
  return c * s * c.transpose();
}

double gap_stochastic(const StochasticLinearGapCase& g) {
  const Eigen::MatrixXd sy = stationary_output_cov(g.a, g.b, g.q, g.c);
  const Eigen::MatrixXd sy_hat =
      stationary_output_cov(g.a_hat, g.b_hat, g.q_hat, g.c_hat);
  if (sy.rows() != sy_hat.rows()) {
    throw std::invalid_argument("asymptotic_gap: output dimensions differ");
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sy.rows());
  return w2_gaussian(zero, sy, zero, sy_hat);
}

double gap_dirac(const DiracMixtureGapCase& g) {
  if (g.truth.size() == 0 || g.model.size() == 0) {
    throw std::invalid_argument("asymptotic_gap: empty atom set");
  }
  if (g.truth.dim != g.model.dim) {
    throw std::invalid_argument("asymptotic_gap: output dimensions differ");
  }
  return w2_lp(g.truth, g.model, {}).distance;
}

}  // namespace

double asymptotic_gap(const AsymptoticGapCase& c) {
  return std::visit(
      [](const auto& g) -> double {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, DeterministicLinearGapCase>) {
          return gap_deterministic_linear(g);
        } else if constexpr (std::is_same_v<T, AffineGapCase>) {
          return gap_affine(g);
        } else if constexpr (std::is_same_v<T, StochasticLinearGapCase>) {
          return gap_stochastic(g);
        } else {
          return gap_dirac(g);
        }
      },
      c);
}

}  // namespace wassval
