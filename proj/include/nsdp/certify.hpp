#pragma once

// Residuals for first- and second-order sequential optimality certificates.
//
// For a point x with multiplier estimates (mu, Omega) and a reference point
// x_ref (the limit candidate):
//
//   feas_eq      = |h(x)|
//   feas_cone    = |project_psd(-G(x))|_F
//   stationarity = |grad_x L(x, mu, Omega)|
//   compl_cakkt  = |G(x) o Omega|_F            (Jordan product)
//   compl_akkt   = |U_a^T Omega U_a|_F         (multiplier mass on the
//                                               positive eigenspace of
//                                               G(x_ref))
//   inner_gap    = <G(x), Omega>               (signed trace pairing)
//   so_residual  = lambda_min( Z^T (hess_x L + sigma) Z ),  +inf when q = 0
//
// with Z = perturbed_subspace_basis(inst, x, x_ref).  A sequence of reports
// decaying to zero is an asymptotic KKT certificate; the second-order
// residual staying above -eps_k upgrades it to a second-order certificate.
// The complementarity measures obey |G o Omega|_F <= |G Omega|_F, and for
// penalty multipliers |G Omega|_F <= |<G, Omega>|, which is the chain that
// makes the Jordan-product residual reachable by pure penalization.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsdp/lagrangian.hpp"
#include "nsdp/merit.hpp"
#include "nsdp/problem.hpp"
#include "nsdp/spectral.hpp"
#include "nsdp/subspace.hpp"
#include "nsdp/sym_matrix.hpp"

namespace nsdp {

struct ResidualReport {
  double feas_eq = 0.0;
  double feas_cone = 0.0;
  double stationarity = 0.0;
  double compl_cakkt = 0.0;
  double compl_akkt = 0.0;
  double inner_gap = 0.0;
  double so_residual = 0.0;
  int subspace_dim = 0;
  double eps_used = 0.0;
  double rho_used = 0.0;
};

inline nlohmann::ordered_json report_to_json(const ResidualReport& r) {
  nlohmann::ordered_json j;
  j["feas_eq"] = r.feas_eq;
  j["feas_cone"] = r.feas_cone;
  j["stationarity"] = r.stationarity;
  j["compl_cakkt"] = r.compl_cakkt;
  j["compl_akkt"] = r.compl_akkt;
  j["inner_gap"] = r.inner_gap;
  if (std::isinf(r.so_residual))
    j["so_residual"] = nullptr;  // JSON has no infinity
  else
    j["so_residual"] = r.so_residual;
  j["subspace_dim"] = r.subspace_dim;
  j["eps_used"] = r.eps_used;
  j["rho_used"] = r.rho_used;
  return j;
}

inline double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (a + a.transpose()));
  return es.eigenvalues().minCoeff();
}

// Smallest eigenvalue of hess_x L + sigma compressed to the subspace basis;
// +inf when the subspace is trivial.  With orthonormal columns this is the
// exact infimum of the quadratic form over unit vectors of the subspace.
template <ProblemLike P>
double so_residual(const P& prob, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& mu, const SymMatrix& omega,
                   const SubspaceBasis& sb) {
  if (sb.dim() == 0) return std::numeric_limits<double>::infinity();
  EvalBundle b = prob.eval(x);
  LagrangianBundle lb = lagrangian_eval(b, mu, omega);
  Eigen::MatrixXd h = lb.hess_x + sigma_term(b, omega);
  return min_eigenvalue(sb.z.transpose() * h * sb.z);
}

template <ProblemLike P>
ResidualReport residual_report(const P& prob, const Iterate& it,
                               const Eigen::VectorXd& x_ref,
                               double tau_rank = kDefaultRankTol) {
  EvalBundle b = prob.eval(it.x);
  ResidualReport r;
  r.feas_eq = b.h_val.norm();
  SymMatrix neg = b.g_val;
  neg *= -1.0;
  r.feas_cone = project_psd(neg).frobenius_norm();

  LagrangianBundle lb = lagrangian_eval(b, it.mu, it.omega);
  r.stationarity = lb.grad_x.norm();
  r.compl_cakkt = jordan(b.g_val, it.omega).frobenius_norm();
  r.inner_gap = inner(b.g_val, it.omega);

  SymSpectrum ref = decompose(prob.eval(x_ref).g_val);
  if (ref.alpha.empty()) {
    r.compl_akkt = 0.0;
  } else {
    Eigen::MatrixXd ua(it.omega.order(), ref.alpha.size());
    for (std::size_t c = 0; c < ref.alpha.size(); ++c)
      ua.col(c) = ref.basis.col(ref.alpha[c]);
    r.compl_akkt = (ua.transpose() * it.omega.dense() * ua).norm();
  }

  SubspaceBasis sb = perturbed_subspace_basis(prob, it.x, x_ref, tau_rank);
  r.subspace_dim = sb.dim();
  r.so_residual = so_residual(prob, it.x, it.mu, it.omega, sb);
  r.eps_used = it.eps;
  r.rho_used = it.rho;
  return r;
}

// Weak second-order necessary condition at an (approximate) KKT point: the
// Lagrangian Hessian plus sigma-term must be positive semidefinite on the
// critical subspace.  Rejects inputs whose KKT residuals exceed tol.
template <ProblemLike P>
bool wsonc_check(const P& prob, const Eigen::VectorXd& x_ref,
                 const Eigen::VectorXd& mu, const SymMatrix& omega,
                 double tol) {
  if (tol <= 0.0)
    throw std::invalid_argument("wsonc_check: tol must be positive");
  EvalBundle b = prob.eval(x_ref);
  auto reject = [](const std::string& which, double value) {
    throw std::invalid_argument("wsonc_check: not a KKT point within tol (" +
                                which + " = " + std::to_string(value) + ")");
  };
  const double feas_eq = b.h_val.norm();
  if (feas_eq > tol) reject("feas_eq", feas_eq);
  SymMatrix neg = b.g_val;
  neg *= -1.0;
  const double feas_cone = project_psd(neg).frobenius_norm();
  if (feas_cone > tol) reject("feas_cone", feas_cone);
  LagrangianBundle lb = lagrangian_eval(b, mu, omega);
  const double stat = lb.grad_x.norm();
  if (stat > tol) reject("stationarity", stat);
  const double cakkt = jordan(b.g_val, omega).frobenius_norm();
  if (cakkt > tol) reject("compl_cakkt", cakkt);
  const double omega_min = min_eigenvalue(omega.dense());
  if (omega_min < -tol) reject("omega_min", omega_min);

  SubspaceBasis sb = critical_subspace_basis(prob, x_ref);
  return so_residual(prob, x_ref, mu, omega, sb) >= -tol;
}

// Minimum over the subspace basis columns z of
//   z^T sigma(x, Omega) z - rho <DG(x)[z], V[DG(x)[z]]>
// with Omega = rho project_psd(-G(x)) and V the Clarke element at G(x).
// Near a reference point the value is nonnegative: the sigma-term dominates
// the curvature the penalty Hessian picks up from the projection.
template <ProblemLike P>
double lemma_gap_check(const P& prob, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& x_ref, double rho,
                       double tau_rank = kDefaultRankTol) {
  if (rho <= 0.0)
    throw std::invalid_argument("lemma_gap_check: rho must be positive");
  EvalBundle b = prob.eval(x);
  auto [mu, omega] = multipliers_from_penalty(b, rho);
  (void)mu;
  Eigen::MatrixXd sig = sigma_term(b, omega);

  SubspaceBasis sb = perturbed_subspace_basis(prob, x, x_ref, tau_rank);
  if (sb.dim() == 0) return std::numeric_limits<double>::infinity();

  double worst = std::numeric_limits<double>::infinity();
  for (int c = 0; c < sb.dim(); ++c) {
    Eigen::VectorXd z = sb.z.col(c);
    SymMatrix dgz = dg_apply(b, z);
    SymMatrix vdgz = clarke_psd_apply(b.g_val, dgz);
    const double val = z.dot(sig * z) - rho * inner(dgz, vdgz);
    worst = std::min(worst, val);
  }
  return worst;
}

// Kurdyka-Lojasiewicz diagnostic along a trace: the ratio
// P(x_k) / max(|grad P(x_k)|, 1e-300) per iterate.  Ratios decaying to zero
// indicate the infeasibility measure satisfies an error-bound inequality
// along the trajectory.
template <ProblemLike P>
std::vector<std::pair<int, double>> kl_diagnostic(
    const P& prob, const std::vector<Iterate>& trace) {
  if (trace.empty())
    throw std::invalid_argument("kl_diagnostic: empty trace");
  std::vector<std::pair<int, double>> out;
  out.reserve(trace.size());
  for (const Iterate& it : trace) {
    ViolationEval v = violation_eval(prob, it.x);
    const double g = std::max(v.gradient.norm(), 1e-300);
    out.emplace_back(it.k, v.p_value / g);
  }
  return out;
}

}  // namespace nsdp
