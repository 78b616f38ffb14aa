#pragma once

// Critical subspace machinery.
//
// Let beta-bar be the near-zero eigenvalue set of G(x_ref) and let
// u_1..u_t span the invariant subspace of the t = |beta-bar| smallest
// eigenvalues of G(x) at the evaluation point x.  The perturbed critical
// subspace is the nullspace of the stacked rows
//
//   grad h_i(x)^T                  for i = 1..p,
//   v_ij(x)_l = u_i^T dG_l(x) u_j  for 1 <= i <= j <= t,
//
// i.e. directions along which the equalities and the compressed cone block
// are stationary to first order.  Rows are scaled to unit norm before the
// rank decision (rows below 1e-14 are dropped); the nullspace and rank come
// from a full SVD with relative threshold tau_rank.  With x = x_ref this is
// the critical subspace at x_ref itself.
//
// wcr_diagnostic probes whether the row rank is locally constant around
// x_ref, sampling uniformly from a ball.

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "nsdp/problem.hpp"
#include "nsdp/spectral.hpp"

namespace nsdp {

inline constexpr double kDefaultRankTol = 1e-8;

struct SubspaceBasis {
  Eigen::MatrixXd z;             // n x q, orthonormal columns
  Eigen::VectorXd x_eval;        // point the rows were built at
  Eigen::VectorXd x_ref;         // point that fixed |beta-bar|
  int beta_dim = 0;              // t
  int constraint_rank = 0;       // rank of the row stack; q = n - rank
  bool selection_unstable = false;

  int dim() const { return static_cast<int>(z.cols()); }
};

// Orthonormal basis of the invariant subspace of the q smallest eigenvalues
// of G(x), columns in decompose order.
template <ProblemLike P>
Eigen::MatrixXd smallest_eig_basis(const P& prob, const Eigen::VectorXd& x,
                                   int q) {
  const int m = prob.dim_m();
  if (q < 0 || q > m)
    throw std::invalid_argument("smallest_eig_basis: q out of range");
  SymSpectrum s = decompose(prob.eval(x).g_val);
  return s.basis.rightCols(q);
}

// Stacked first-order constraint rows at the bundle's point, compressed
// through the columns of ubar.  Rows are unit-normalized; rows with norm
// below 1e-14 are dropped.
inline Eigen::MatrixXd constraint_rows(const EvalBundle& b,
                                       const Eigen::MatrixXd& ubar) {
  const int n = static_cast<int>(b.x.size());
  const int t = static_cast<int>(ubar.cols());
  const int p = static_cast<int>(b.h_val.size());
  Eigen::MatrixXd rows(p + t * (t + 1) / 2, n);
  int r = 0;
  for (int i = 0; i < p; ++i) rows.row(r++) = b.jac_h.row(i);
  for (int i = 0; i < t; ++i) {
    for (int j = i; j < t; ++j) {
      for (int l = 0; l < n; ++l)
        rows(r, l) = ubar.col(i).dot(b.dg[l].dense() * ubar.col(j));
      ++r;
    }
  }

  Eigen::MatrixXd kept(rows.rows(), n);
  int k = 0;
  for (int i = 0; i < rows.rows(); ++i) {
    const double nrm = rows.row(i).norm();
    if (nrm < 1e-14) continue;
    kept.row(k++) = rows.row(i) / nrm;
  }
  return kept.topRows(k);
}

namespace detail {

struct NullspaceResult {
  Eigen::MatrixXd z;
  int rank = 0;
};

inline NullspaceResult nullspace(const Eigen::MatrixXd& rows, int n,
                                 double tau_rank) {
  if (rows.rows() == 0)
    return {Eigen::MatrixXd::Identity(n, n), 0};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > tau_rank * smax) ++rank;
  return {svd.matrixV().rightCols(n - rank), rank};
}

}  // namespace detail

// Basis of the nullspace of the rows built at x through an explicit ubar.
// x_ref is recorded for reporting only; the caller owns the basis choice.
template <ProblemLike P>
SubspaceBasis subspace_with_basis(const P& prob, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& x_ref,
                                  const Eigen::MatrixXd& ubar,
                                  double tau_rank = kDefaultRankTol) {
  EvalBundle b = prob.eval(x);
  Eigen::MatrixXd rows = constraint_rows(b, ubar);
  auto ns = detail::nullspace(rows, prob.dim_n(), tau_rank);

  SubspaceBasis out;
  out.z = std::move(ns.z);
  out.x_eval = x;
  out.x_ref = x_ref;
  out.beta_dim = static_cast<int>(ubar.cols());
  out.constraint_rank = ns.rank;

  const int t = out.beta_dim;
  const int m = prob.dim_m();
  if (t > 0 && t < m) {
    SymSpectrum s = decompose(b.g_val);
    // Eigenvalues are non-increasing; the selected block is the last t.  A
    // gap below 10x the classification tolerance between the (t+1)-smallest
    // and t-smallest eigenvalues makes the block selection fragile.
    const double gap = s.eigenvalues[m - t - 1] - s.eigenvalues[m - t];
    out.selection_unstable = gap < 10.0 * s.tol_used;
  }
  return out;
}

template <ProblemLike P>
SubspaceBasis perturbed_subspace_basis(const P& prob, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& x_ref,
                                       double tau_rank = kDefaultRankTol) {
  SymSpectrum ref = decompose(prob.eval(x_ref).g_val);
  const int t = static_cast<int>(ref.beta.size());
  Eigen::MatrixXd ubar = smallest_eig_basis(prob, x, t);
  return subspace_with_basis(prob, x, x_ref, ubar, tau_rank);
}

template <ProblemLike P>
SubspaceBasis critical_subspace_basis(const P& prob,
                                      const Eigen::VectorXd& x_ref,
                                      double tau_rank = kDefaultRankTol) {
  return perturbed_subspace_basis(prob, x_ref, x_ref, tau_rank);
}

struct WcrReport {
  int center_rank = 0;
  std::vector<int> sampled_ranks;
  double radius = 0.0;
  bool holds = false;
};

// Checks whether the constraint-row rank is constant on a ball around x_ref:
// the weak constant rank property fails exactly when some sampled rank
// differs from the rank at the center.
template <ProblemLike P>
WcrReport wcr_diagnostic(const P& prob, const Eigen::VectorXd& x_ref,
                         double radius, int n_samples,
                         double tau_rank = kDefaultRankTol,
                         unsigned long seed = 0) {
  if (radius <= 0.0)
    throw std::invalid_argument("wcr_diagnostic: radius must be positive");
  if (n_samples < 0)
    throw std::invalid_argument("wcr_diagnostic: negative sample count");
  const int n = prob.dim_n();

  SymSpectrum ref = decompose(prob.eval(x_ref).g_val);
  const int t = static_cast<int>(ref.beta.size());

  auto rank_at = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd ubar = smallest_eig_basis(prob, x, t);
    Eigen::MatrixXd rows = constraint_rows(prob.eval(x), ubar);
    return detail::nullspace(rows, n, tau_rank).rank;
  };

  WcrReport rep;
  rep.radius = radius;
  rep.center_rank = rank_at(x_ref);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  rep.holds = true;
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd dir(n);
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    double nrm = dir.norm();
    if (nrm == 0.0) nrm = 1.0;
    const double r = radius * std::pow(unif(rng), 1.0 / n);
    Eigen::VectorXd x = x_ref + (r / nrm) * dir;
    const int rk = rank_at(x);
    rep.sampled_ranks.push_back(rk);
    if (rk != rep.center_rank) rep.holds = false;
  }
  return rep;
}

}  // namespace nsdp
