#pragma once

// Robinson constraint qualification diagnostic.
//
// At a feasible x_ref the CQ asks for full row rank of Dh(x_ref) together
// with a direction d in the kernel of Dh making the linearized cone map
// strictly feasible: G(x_ref) + DG(x_ref)[d] > 0.  The strict feasibility
// margin is probed through the auxiliary program
//
//   maximize t   s.t.  Dh(x_ref) d = 0,
//                      G(x_ref) + DG(x_ref)[d] - t I  PSD,
//                      R^2 - |d|^2 >= 0,
//
// encoded as a block-diagonal cone instance and solved with this package's
// own penalty loop from (d, t) = (0, lambda_min(G(x_ref))).  The returned
// margin is recomputed directly from the candidate direction (clipped to
// the ball and projected onto the kernel of Dh), so it is a certified lower
// bound on the optimum regardless of how accurately the auxiliary solve
// finished.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "nsdp/certify.hpp"
#include "nsdp/problem.hpp"
#include "nsdp/solver.hpp"
#include "nsdp/spectral.hpp"
#include "nsdp/subspace.hpp"

namespace nsdp {

struct RobinsonReport {
  bool rank_ok = false;
  double slater_margin = 0.0;
  bool held = false;
  bool conclusive = false;  // auxiliary solve reached its own tolerance
  SolveStatus aux_status = SolveStatus::inner_failure;
};

namespace detail {

inline SymMatrix block_pad(const SymMatrix& top, double corner) {
  SymMatrix out(top.order() + 1);
  for (int i = 0; i < top.order(); ++i)
    for (int j = 0; j <= i; ++j) out.ref(i, j) = top(i, j);
  out.ref(top.order(), top.order()) = corner;
  return out;
}

}  // namespace detail

template <ProblemLike P>
RobinsonReport robinson_diagnostic(const P& prob, const Eigen::VectorXd& x_ref,
                                   double tol = 1e-6, double radius = 10.0,
                                   SolverConfig cfg = {}) {
  if (tol <= 0.0)
    throw std::invalid_argument("robinson_diagnostic: tol must be positive");
  if (radius <= 0.0)
    throw std::invalid_argument("robinson_diagnostic: radius must be positive");
  const int n = prob.dim_n();
  const int p = prob.dim_p();
  const int m = prob.dim_m();
  EvalBundle b = prob.eval(x_ref);

  RobinsonReport rep;
  if (p == 0) {
    rep.rank_ok = true;
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.jac_h);
    const Eigen::VectorXd& sv = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv[i] > kDefaultRankTol * sv[0]) ++rank;
    rep.rank_ok = rank == p;
  }

  // Auxiliary instance in y = (d, t).
  ProblemInstance aux;
  aux.name = "robinson-aux";
  aux.n = n + 1;
  aux.p = p;
  aux.m = m + 1;
  aux.objective.a = Eigen::VectorXd::Zero(n + 1);
  aux.objective.a[n] = -1.0;
  aux.objective.q = SymMatrix(n + 1);
  for (int j = 0; j < p; ++j) {
    QuadraticScalar eq;
    eq.a = Eigen::VectorXd::Zero(n + 1);
    eq.a.head(n) = b.jac_h.row(j).transpose();
    eq.q = SymMatrix(n + 1);
    aux.equalities.push_back(std::move(eq));
  }
  aux.cone_const = detail::block_pad(b.g_val, radius * radius);
  for (int l = 0; l < n; ++l)
    aux.cone_lin.push_back(detail::block_pad(b.dg[l], 0.0));
  SymMatrix slack(m + 1);
  for (int i = 0; i < m; ++i) slack.ref(i, i) = -1.0;
  aux.cone_lin.push_back(slack);
  for (int l = 0; l < n; ++l) {
    SymMatrix ball(m + 1);
    ball.ref(m, m) = -2.0;
    aux.cone_quad.push_back({l, l, ball});
  }

  Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + 1);
  const double g_lmin = min_eigenvalue(b.g_val.dense());
  y0[n] = m > 0 ? g_lmin : 0.0;

  SolverTrace aux_trace = run_penalty(aux, y0, cfg);
  rep.aux_status = aux_trace.status;
  rep.conclusive = aux_trace.status == SolveStatus::converged;

  Eigen::VectorXd d = aux_trace.x_ref_used.head(n);
  if (p > 0) {
    // Project exactly onto the kernel of Dh so the certified margin uses a
    // direction that satisfies the equality linearization.
    Eigen::MatrixXd jh = b.jac_h;
    Eigen::VectorXd rhs = jh * d;
    Eigen::VectorXd corr =
        jh.transpose() * (jh * jh.transpose()).ldlt().solve(rhs);
    if (corr.allFinite()) d -= corr;
  }
  const double dn = d.norm();
  if (dn > radius) d *= radius / dn;

  auto margin_of = [&](const Eigen::VectorXd& dir) {
    SymMatrix g = b.g_val;
    g += dg_apply(b, dir);
    return min_eigenvalue(g.dense());
  };
  rep.slater_margin = std::max(margin_of(d), g_lmin);
  rep.held = rep.rank_ok && rep.slater_margin > tol;
  return rep;
}

inline nlohmann::ordered_json robinson_to_json(const RobinsonReport& r) {
  nlohmann::ordered_json j;
  j["rank_ok"] = r.rank_ok;
  j["slater_margin"] = r.slater_margin;
  j["held"] = r.held;
  j["conclusive"] = r.conclusive;
  j["aux_status"] = to_string(r.aux_status);
  return j;
}

inline nlohmann::ordered_json wcr_to_json(const WcrReport& r) {
  nlohmann::ordered_json j;
  j["center_rank"] = r.center_rank;
  j["sampled_ranks"] = r.sampled_ranks;
  j["radius"] = r.radius;
  j["holds"] = r.holds;
  return j;
}

}  // namespace nsdp
