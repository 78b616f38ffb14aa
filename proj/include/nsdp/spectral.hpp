#pragma once

// Spectral calculus on the PSD cone S_+^m.
//
// For symmetric M with eigendecomposition M = U diag(lambda) U^T,
// eigenvalues sorted non-increasing:
//
//   project_psd(M)    = U diag(max(lambda, 0)) U^T      (metric projection)
//   pseudoinverse(M)  = U diag(1/lambda on |lambda| > tau, else 0) U^T
//
// Moreau decomposition: M = project_psd(M) - project_psd(-M), and the two
// parts are orthogonal in the trace inner product.
//
// clarke_psd_apply(M, H) evaluates V[H] for a fixed element V of the Clarke
// generalized Jacobian of X |-> project_psd(-X) at X = M.  In the eigenbasis
// of M it is the Hadamard product
//
//   V[H] = U (B o (U^T H U)) U^T,
//   B_ij = (max(nu_i,0) + max(nu_j,0)) / (|nu_i| + |nu_j|),   0/0 := 1,
//
// where nu = -clamp(lambda): eigenvalues of M with the near-zero set beta
// clamped to exactly zero before negation.  The clamping selects the element
// of the Clarke set that acts as the identity on the kernel block.  On the
// index sets alpha (lambda > tau), beta (|lambda| <= tau), gamma
// (lambda < -tau) this gives blocks
//
//   B_aa = 0,  B_ab = 0,  B_ag = -lambda_j / (lambda_i - lambda_j),
//   B_bb = B_bg = B_gg = 1,
//
// which is the directional-derivative structure of the projection.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nsdp/sym_matrix.hpp"

namespace nsdp {

struct SymSpectrum {
  Eigen::VectorXd eigenvalues;  // non-increasing
  Eigen::MatrixXd basis;        // orthogonal; column i pairs with eigenvalue i
  std::vector<int> alpha;       // eigenvalue > tol
  std::vector<int> beta;        // |eigenvalue| <= tol
  std::vector<int> gamma;       // eigenvalue < -tol
  double tol_used = 0.0;
};

namespace detail {

inline bool column_lex_less(const Eigen::MatrixXd& u, int a, int b) {
  for (int r = 0; r < u.rows(); ++r) {
    if (u(r, a) != u(r, b)) return u(r, a) < u(r, b);
  }
  return false;
}

// Factorization with a fixed ordering convention: eigenvalues sorted
// non-increasing, each eigenvector's first nonzero component made positive,
// exact eigenvalue ties broken by lexicographic column comparison.  The same
// input always produces the same output.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> sorted_factor(
    const SymMatrix& m) {
  const int n = m.order();
  if (n == 0) return {Eigen::VectorXd(0), Eigen::MatrixXd(0, 0)};
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("decompose: eigensolver failed to converge");

  Eigen::VectorXd lam = es.eigenvalues();
  Eigen::MatrixXd u = es.eigenvectors();

  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      if (u(r, c) != 0.0) {
        if (u(r, c) < 0.0) u.col(c) = -u.col(c);
        break;
      }
    }
  }

  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (lam[a] != lam[b]) return lam[a] > lam[b];
    return column_lex_less(u, a, b);
  });

  Eigen::VectorXd lam_sorted(n);
  Eigen::MatrixXd u_sorted(n, n);
  for (int i = 0; i < n; ++i) {
    lam_sorted[i] = lam[idx[i]];
    u_sorted.col(i) = u.col(idx[i]);
  }
  return {std::move(lam_sorted), std::move(u_sorted)};
}

inline SymSpectrum classify(std::pair<Eigen::VectorXd, Eigen::MatrixXd> f,
                            double tau_eig) {
  SymSpectrum s;
  s.eigenvalues = std::move(f.first);
  s.basis = std::move(f.second);
  s.tol_used = tau_eig;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    if (s.eigenvalues[i] > tau_eig)
      s.alpha.push_back(i);
    else if (s.eigenvalues[i] < -tau_eig)
      s.gamma.push_back(i);
    else
      s.beta.push_back(i);
  }
  return s;
}

}  // namespace detail

inline SymSpectrum decompose(const SymMatrix& m, double tau_eig) {
  if (tau_eig < 0.0)
    throw std::invalid_argument("decompose: negative tolerance");
  return detail::classify(detail::sorted_factor(m), tau_eig);
}

// Default tolerance: 1e-8 * max(1, |lambda|_max).
inline SymSpectrum decompose(const SymMatrix& m) {
  auto f = detail::sorted_factor(m);
  double lmax = 0.0;
  for (int i = 0; i < f.first.size(); ++i)
    lmax = std::max(lmax, std::abs(f.first[i]));
  return detail::classify(std::move(f), 1e-8 * std::max(1.0, lmax));
}

inline double default_eig_tol(const SymMatrix& m) {
  auto f = detail::sorted_factor(m);
  double lmax = 0.0;
  for (int i = 0; i < f.first.size(); ++i)
    lmax = std::max(lmax, std::abs(f.first[i]));
  return 1e-8 * std::max(1.0, lmax);
}

inline SymMatrix project_psd(const SymMatrix& m) {
  SymSpectrum s = decompose(m, 0.0);
  Eigen::VectorXd pos = s.eigenvalues.cwiseMax(0.0);
  return SymMatrix::symmetrize(s.basis * pos.asDiagonal() *
                               s.basis.transpose());
}

inline SymMatrix pseudoinverse(const SymMatrix& m, double tau_eig) {
  SymSpectrum s = decompose(m, tau_eig);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(m.order());
  for (int i : s.alpha) inv[i] = 1.0 / s.eigenvalues[i];
  for (int i : s.gamma) inv[i] = 1.0 / s.eigenvalues[i];
  return SymMatrix::symmetrize(s.basis * inv.asDiagonal() *
                               s.basis.transpose());
}

inline SymMatrix pseudoinverse(const SymMatrix& m) {
  return pseudoinverse(m, default_eig_tol(m));
}

// Jordan product A o B = (AB + BA)/2.
inline SymMatrix jordan(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order())
    throw std::invalid_argument("jordan: order mismatch");
  Eigen::MatrixXd ab = a.dense() * b.dense();
  return SymMatrix::symmetrize(ab);
}

// Applies the Clarke element described in the header to H.  Index sets come
// from decompose(M, tau_eig); the beta eigenvalues are clamped before the
// quotient so the kernel block acts as the identity.
inline SymMatrix clarke_psd_apply(const SymMatrix& m, const SymMatrix& h,
                                  double tau_eig) {
  if (m.order() != h.order())
    throw std::invalid_argument("clarke_psd_apply: order mismatch");
  const int n = m.order();
  SymSpectrum s = decompose(m, tau_eig);

  Eigen::VectorXd nu = -s.eigenvalues;
  for (int i : s.beta) nu[i] = 0.0;

  Eigen::MatrixXd ht = s.basis.transpose() * h.dense() * s.basis;
  Eigen::MatrixXd t(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double den = std::abs(nu[i]) + std::abs(nu[j]);
      const double num = std::max(nu[i], 0.0) + std::max(nu[j], 0.0);
      const double b = den == 0.0 ? 1.0 : num / den;
      t(i, j) = b * ht(i, j);
    }
  }
  return SymMatrix::symmetrize(s.basis * t * s.basis.transpose());
}

inline SymMatrix clarke_psd_apply(const SymMatrix& m, const SymMatrix& h) {
  return clarke_psd_apply(m, h, default_eig_tol(m));
}

}  // namespace nsdp
