#pragma once

// Lagrangian and curvature correction.
//
//   L(x, mu, Omega) = f(x) - <h(x), mu> - <G(x), Omega>
//
// with gradient and Hessian in x.  The sigma-term
//
//   sigma(x, Omega)_ij = 2 <Omega, dG_i(x) G(x)^+ dG_j(x)>
//
// carries the curvature of the cone constraint that the Lagrangian Hessian
// misses; it enters every second-order check below.  The matrix is symmetric
// up to roundoff (trace cyclicity) and is symmetrized explicitly.
//
// multipliers_from_penalty maps a penalty iterate to the multiplier estimates
//
//   mu = -rho h(x),   Omega = rho project_psd(-G(x)),
//
// which are exactly the quantities whose convergence the penalty scheme
// tracks.

#include <Eigen/Core>

#include <stdexcept>
#include <utility>

#include "nsdp/problem.hpp"
#include "nsdp/spectral.hpp"
#include "nsdp/sym_matrix.hpp"

namespace nsdp {

struct Iterate {
  Eigen::VectorXd x;
  Eigen::VectorXd mu;  // p
  SymMatrix omega;     // order m, PSD up to tolerance
  double rho = 0.0;
  double eps = 0.0;
  int k = 0;
};

struct LagrangianBundle {
  double value = 0.0;
  Eigen::VectorXd grad_x;
  Eigen::MatrixXd hess_x;
};

inline LagrangianBundle lagrangian_eval(const EvalBundle& b,
                                        const Eigen::VectorXd& mu,
                                        const SymMatrix& omega) {
  if (mu.size() != b.h_val.size())
    throw std::invalid_argument("lagrangian_eval: mu has wrong dimension");
  if (omega.order() != b.g_val.order())
    throw std::invalid_argument("lagrangian_eval: Omega has wrong order");
  LagrangianBundle out;
  out.value = b.f_val - b.h_val.dot(mu) - inner(b.g_val, omega);
  out.grad_x = b.grad_f - b.jac_h.transpose() * mu - dg_adjoint(b, omega);
  out.hess_x = b.hess_f;
  for (int i = 0; i < mu.size(); ++i) out.hess_x -= mu[i] * b.hess_h[i];
  out.hess_x -= d2g_adjoint(b, omega);
  return out;
}

template <ProblemLike P>
LagrangianBundle lagrangian_eval(const P& prob, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& mu,
                                 const SymMatrix& omega) {
  return lagrangian_eval(prob.eval(x), mu, omega);
}

inline Eigen::MatrixXd sigma_term(const EvalBundle& b, const SymMatrix& omega,
                                  double tau_eig) {
  if (omega.order() != b.g_val.order())
    throw std::invalid_argument("sigma_term: Omega has wrong order");
  const int n = static_cast<int>(b.x.size());
  Eigen::MatrixXd gpinv = pseudoinverse(b.g_val, tau_eig).dense();
  Eigen::MatrixXd om = omega.dense();
  Eigen::MatrixXd sig(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::MatrixXd right = gpinv * b.dg[j].dense();
    for (int i = 0; i < n; ++i)
      sig(i, j) = 2.0 * (om * b.dg[i].dense() * right).trace();
  }
  return 0.5 * (sig + sig.transpose());
}

inline Eigen::MatrixXd sigma_term(const EvalBundle& b, const SymMatrix& omega) {
  return sigma_term(b, omega, default_eig_tol(b.g_val));
}

template <ProblemLike P>
Eigen::MatrixXd sigma_term(const P& prob, const Eigen::VectorXd& x,
                           const SymMatrix& omega) {
  return sigma_term(prob.eval(x), omega);
}

inline std::pair<Eigen::VectorXd, SymMatrix> multipliers_from_penalty(
    const EvalBundle& b, double rho) {
  SymMatrix neg = b.g_val;
  neg *= -1.0;
  SymMatrix omega = project_psd(neg);
  omega *= rho;
  return {-rho * b.h_val, std::move(omega)};
}

template <ProblemLike P>
std::pair<Eigen::VectorXd, SymMatrix> multipliers_from_penalty(
    const P& prob, const Eigen::VectorXd& x, double rho) {
  return multipliers_from_penalty(prob.eval(x), rho);
}

}  // namespace nsdp
