#pragma once

// Infeasibility measure and penalty function.
//
//   P(x)      = ( |h(x)|^2 + |project_psd(-G(x))|_F^2 ) / 2
//   grad P(x) = Dh(x)^T h(x) - DG(x)* [ project_psd(-G(x)) ]
//
// P is continuously differentiable everywhere even though the projection is
// not; the composition with the squared norm smooths the kink.
//
//   phi_rho(x) = f(x) + rho P(x)
//
// penalty_hessian_element returns one element of the generalized Hessian of
// phi_rho obtained from the Clarke element of the projection:
//
//   H = hess f - sum_i mu_i hess h_i - D^2G(x)* [Omega]
//       + rho Dh(x)^T Dh(x) + K,
//   K_lj = rho <dG_l, V[dG_j]>,   V = clarke_psd_apply(G(x), .),
//
// with mu = -rho h(x) and Omega = rho project_psd(-G(x)).  The result is
// symmetrized since K is symmetric only in exact arithmetic.
//
// regularized_penalty adds the quartic proximal term |x - x_ref|^4 / 4.

#include <Eigen/Core>

#include <utility>

#include "nsdp/problem.hpp"
#include "nsdp/spectral.hpp"
#include "nsdp/sym_matrix.hpp"

namespace nsdp {

struct ViolationEval {
  double p_value = 0.0;
  Eigen::VectorXd gradient;
};

struct PenaltyEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  double rho = 0.0;
};

inline ViolationEval violation_eval(const EvalBundle& b) {
  ViolationEval out;
  SymMatrix neg_part = project_psd([&] {
    SymMatrix s = b.g_val;
    s *= -1.0;
    return s;
  }());
  const double hn = b.h_val.squaredNorm();
  const double gn = neg_part.frobenius_norm();
  out.p_value = 0.5 * (hn + gn * gn);
  out.gradient = b.jac_h.transpose() * b.h_val - dg_adjoint(b, neg_part);
  return out;
}

template <ProblemLike P>
ViolationEval violation_eval(const P& prob, const Eigen::VectorXd& x) {
  return violation_eval(prob.eval(x));
}

inline PenaltyEval penalty_eval(const EvalBundle& b, double rho) {
  ViolationEval v = violation_eval(b);
  PenaltyEval out;
  out.value = b.f_val + rho * v.p_value;
  out.gradient = b.grad_f + rho * v.gradient;
  out.rho = rho;
  return out;
}

template <ProblemLike P>
PenaltyEval penalty_eval(const P& prob, const Eigen::VectorXd& x, double rho) {
  return penalty_eval(prob.eval(x), rho);
}

inline Eigen::MatrixXd penalty_hessian_element(const EvalBundle& b,
                                               double rho) {
  const int n = static_cast<int>(b.x.size());
  SymMatrix neg_part = project_psd([&] {
    SymMatrix s = b.g_val;
    s *= -1.0;
    return s;
  }());
  SymMatrix omega = neg_part;
  omega *= rho;
  Eigen::VectorXd mu = -rho * b.h_val;

  Eigen::MatrixXd h = b.hess_f;
  for (int i = 0; i < b.h_val.size(); ++i) h -= mu[i] * b.hess_h[i];
  h -= d2g_adjoint(b, omega);
  h += rho * b.jac_h.transpose() * b.jac_h;

  Eigen::MatrixXd k(n, n);
  for (int j = 0; j < n; ++j) {
    SymMatrix vj = clarke_psd_apply(b.g_val, b.dg[j]);
    for (int l = 0; l < n; ++l) k(l, j) = rho * inner(b.dg[l], vj);
  }
  h += 0.5 * (k + k.transpose());
  return 0.5 * (h + h.transpose());
}

template <ProblemLike P>
Eigen::MatrixXd penalty_hessian_element(const P& prob, const Eigen::VectorXd& x,
                                        double rho) {
  return penalty_hessian_element(prob.eval(x), rho);
}

inline std::pair<double, Eigen::VectorXd> regularized_penalty_eval(
    const EvalBundle& b, const Eigen::VectorXd& x_ref, double rho) {
  PenaltyEval pe = penalty_eval(b, rho);
  const Eigen::VectorXd d = b.x - x_ref;
  const double r2 = d.squaredNorm();
  return {pe.value + 0.25 * r2 * r2, pe.gradient + r2 * d};
}

template <ProblemLike P>
std::pair<double, Eigen::VectorXd> regularized_penalty_eval(
    const P& prob, const Eigen::VectorXd& x, const Eigen::VectorXd& x_ref,
    double rho) {
  return regularized_penalty_eval(prob.eval(x), x_ref, rho);
}

}  // namespace nsdp
