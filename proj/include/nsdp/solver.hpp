#pragma once

// Outer penalty loop and inner subproblem solver.
//
// Outer loop, k = 0, 1, ...: with rho_k = rho0 * rho_mult^k and
// eps_k = eps0 * eps_mult^k, find x_k with
//
//   |grad phi_k(x_k)| <= eps_k   and   lambda_min(H_k) >= -eps_k,
//
// where phi_k = f + rho_k P and H_k is the generalized Hessian element from
// penalty_hessian_element.  Multiplier estimates mu_k = -rho_k h(x_k),
// Omega_k = rho_k project_psd(-G(x_k)) feed the residual reports; all
// reports are recomputed against the final iterate as reference once the
// loop stops, so the subspace classification is consistent across the trace.
//
// Inner solver: safeguarded Newton descent on phi_k.  When the Hessian
// element has an eigenvalue below -eps the corresponding unit eigenvector
// (oriented downhill) is used with a curvature backtracking test
// phi(x + t d) <= phi(x) - c |lambda_min| t^2 / 2; otherwise a shifted
// Newton step (H + max(0, -lambda_min + 1e-8) I) d = -grad with the usual
// Armijo test.  After the first iteration the gradient target tightens to
// min(eps, inner_polish) so each subproblem is solved to the accuracy the
// multiplier formulas need, while an already-satisfied entry point returns
// untouched.

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsdp/certify.hpp"
#include "nsdp/lagrangian.hpp"
#include "nsdp/merit.hpp"
#include "nsdp/problem.hpp"

namespace nsdp {

struct SolverConfig {
  double rho0 = 1.0;
  double rho_mult = 10.0;
  double eps0 = 1e-2;
  double eps_mult = 0.25;
  double tol_outer = 1e-6;
  int max_outer = 12;
  int max_inner = 500;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  double curvature_step = 1.0;
  double inner_polish = 1e-8;
  unsigned long seed = 0;

  void validate() const {
    if (rho0 <= 0.0) throw std::invalid_argument("config: rho0 must be positive");
    if (rho_mult <= 1.0)
      throw std::invalid_argument("config: rho_mult must exceed 1");
    if (eps0 <= 0.0) throw std::invalid_argument("config: eps0 must be positive");
    if (eps_mult <= 0.0 || eps_mult >= 1.0)
      throw std::invalid_argument("config: eps_mult must lie in (0,1)");
    if (tol_outer <= 0.0)
      throw std::invalid_argument("config: tol_outer must be positive");
    if (max_outer < 1)
      throw std::invalid_argument("config: max_outer must be at least 1");
    if (max_inner < 0)
      throw std::invalid_argument("config: max_inner must be nonnegative");
    if (armijo_c <= 0.0 || armijo_c >= 1.0)
      throw std::invalid_argument("config: armijo_c must lie in (0,1)");
    if (backtrack <= 0.0 || backtrack >= 1.0)
      throw std::invalid_argument("config: backtrack must lie in (0,1)");
    if (curvature_step <= 0.0)
      throw std::invalid_argument("config: curvature_step must be positive");
    if (inner_polish <= 0.0)
      throw std::invalid_argument("config: inner_polish must be positive");
  }
};

enum class SolveStatus {
  converged,
  budget_exhausted,
  infeasible_stationary,
  inner_failure
};

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::budget_exhausted: return "budget_exhausted";
    case SolveStatus::infeasible_stationary: return "infeasible_stationary";
    case SolveStatus::inner_failure: return "inner_failure";
  }
  return "unknown";
}

struct SubproblemResult {
  Eigen::VectorXd x;
  int inner_iters = 0;
  bool ok = false;
};

struct SolverTrace {
  std::vector<Iterate> iterates;
  std::vector<ResidualReport> reports;
  std::vector<int> inner_iterations;
  std::vector<bool> inner_certified;
  SolveStatus status = SolveStatus::budget_exhausted;
  Eigen::VectorXd x_ref_used;
};

namespace detail {

struct EigPair {
  double lmin = 0.0;
  Eigen::VectorXd vec;
};

inline EigPair min_eig_pair(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  EigPair out;
  out.lmin = es.eigenvalues()[0];
  out.vec = es.eigenvectors().col(0);
  return out;
}

}  // namespace detail

template <ProblemLike P>
SubproblemResult solve_subproblem(const P& prob, double rho, double eps,
                                  const Eigen::VectorXd& x0,
                                  const SolverConfig& cfg = {}) {
  cfg.validate();
  if (rho <= 0.0)
    throw std::invalid_argument("solve_subproblem: rho must be positive");
  if (eps <= 0.0)
    throw std::invalid_argument("solve_subproblem: eps must be positive");
  if (x0.size() != prob.dim_n())
    throw std::invalid_argument("solve_subproblem: x0 has wrong dimension");

  Eigen::VectorXd x = x0;
  EvalBundle b = prob.eval(x);
  PenaltyEval pe = penalty_eval(b, rho);

  for (int it = 0; it < cfg.max_inner; ++it) {
    Eigen::MatrixXd h = penalty_hessian_element(b, rho);
    detail::EigPair ep = detail::min_eig_pair(h);
    const double gnorm = pe.gradient.norm();
    const double grad_target = it == 0 ? eps : std::min(eps, cfg.inner_polish);
    if (gnorm <= grad_target && ep.lmin >= -eps) return {x, it, true};

    Eigen::VectorXd d;
    bool curvature = ep.lmin < -eps;
    double step = curvature ? cfg.curvature_step : 1.0;
    if (curvature) {
      d = ep.vec;
      if (pe.gradient.dot(d) > 0.0) d = -d;
    } else {
      const double shift = std::max(0.0, -ep.lmin + 1e-8);
      Eigen::MatrixXd hs = h + shift * Eigen::MatrixXd::Identity(h.rows(), h.cols());
      d = hs.ldlt().solve(-pe.gradient);
      if (!d.allFinite() || pe.gradient.dot(d) >= 0.0) d = -pe.gradient;
    }

    const double slope = pe.gradient.dot(d);
    bool accepted = false;
    while (step > 1e-16) {
      Eigen::VectorXd cand = x + step * d;
      EvalBundle cb = prob.eval(cand);
      PenaltyEval cpe = penalty_eval(cb, rho);
      const double required =
          curvature
              ? pe.value - 0.5 * cfg.armijo_c * std::abs(ep.lmin) * step * step
              : pe.value + cfg.armijo_c * step * slope;
      if (cpe.value <= required) {
        x = std::move(cand);
        b = std::move(cb);
        pe = std::move(cpe);
        accepted = true;
        break;
      }
      step *= cfg.backtrack;
    }
    if (!accepted) {
      // Backtracking stalled at machine precision.  If the caller's
      // tolerance already holds we are done; otherwise report failure with
      // the best point reached (descent is monotone, so that is x).
      if (gnorm <= eps && ep.lmin >= -eps) return {x, it, true};
      return {x, it, false};
    }
  }

  Eigen::MatrixXd h = penalty_hessian_element(b, rho);
  detail::EigPair ep = detail::min_eig_pair(h);
  if (pe.gradient.norm() <= eps && ep.lmin >= -eps)
    return {x, cfg.max_inner, true};
  return {x, cfg.max_inner, false};
}

template <ProblemLike P>
SolverTrace run_penalty(const P& prob, const Eigen::VectorXd& x0,
                        const SolverConfig& cfg = {}) {
  cfg.validate();
  if (x0.size() != prob.dim_n())
    throw std::invalid_argument("run_penalty: x0 has wrong dimension");

  SolverTrace trace;
  Eigen::VectorXd x = x0;
  bool stopped = false;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const double rho = cfg.rho0 * std::pow(cfg.rho_mult, k);
    const double eps = cfg.eps0 * std::pow(cfg.eps_mult, k);

    SubproblemResult sub = solve_subproblem(prob, rho, eps, x, cfg);
    x = sub.x;

    EvalBundle b = prob.eval(x);
    auto [mu, omega] = multipliers_from_penalty(b, rho);
    Iterate it;
    it.x = x;
    it.mu = std::move(mu);
    it.omega = std::move(omega);
    it.rho = rho;
    it.eps = eps;
    it.k = k;
    trace.iterates.push_back(std::move(it));
    trace.inner_iterations.push_back(sub.inner_iters);

    // Post-hoc certificate that the inner conditions really hold at x.
    PenaltyEval pe = penalty_eval(b, rho);
    const double lmin =
        detail::min_eig_pair(penalty_hessian_element(b, rho)).lmin;
    trace.inner_certified.push_back(pe.gradient.norm() <= eps && lmin >= -eps);

    ResidualReport rep = residual_report(prob, trace.iterates.back(), x);
    trace.reports.push_back(rep);

    if (!sub.ok) {
      trace.status = SolveStatus::inner_failure;
      stopped = true;
      break;
    }

    const double tol = cfg.tol_outer;
    const bool feasible = rep.feas_eq + rep.feas_cone <= tol;
    const bool second_order_ok =
        rep.subspace_dim == 0 || rep.so_residual >= -std::max(eps, tol);
    if (feasible && rep.stationarity <= tol && rep.compl_cakkt <= tol &&
        second_order_ok) {
      trace.status = SolveStatus::converged;
      stopped = true;
      break;
    }

    ViolationEval viol = violation_eval(b);
    if (viol.gradient.norm() <= tol && viol.p_value > tol) {
      trace.status = SolveStatus::infeasible_stationary;
      stopped = true;
      break;
    }
  }
  if (!stopped) trace.status = SolveStatus::budget_exhausted;

  trace.x_ref_used = trace.iterates.back().x;
  trace.reports.clear();
  for (const Iterate& itk : trace.iterates)
    trace.reports.push_back(residual_report(prob, itk, trace.x_ref_used));
  return trace;
}

namespace detail {

inline nlohmann::ordered_json vector_json_sol(const Eigen::VectorXd& v) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace detail

// One JSON object per outer iterate, then a closing status line.
inline std::string trace_to_jsonl(const SolverTrace& trace) {
  std::ostringstream os;
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    const Iterate& it = trace.iterates[k];
    nlohmann::ordered_json j;
    j["k"] = it.k;
    j["rho"] = it.rho;
    j["eps"] = it.eps;
    j["x"] = detail::vector_json_sol(it.x);
    j["mu"] = detail::vector_json_sol(it.mu);
    j["omega"] = nlohmann::ordered_json(it.omega.packed());
    j["inner_iters"] = trace.inner_iterations[k];
    j["certified"] = static_cast<bool>(trace.inner_certified[k]);
    j["report"] = report_to_json(trace.reports[k]);
    os << j.dump() << "\n";
  }
  nlohmann::ordered_json tail;
  tail["status"] = to_string(trace.status);
  tail["x_ref_used"] = detail::vector_json_sol(trace.x_ref_used);
  os << tail.dump() << "\n";
  return os.str();
}

}  // namespace nsdp
