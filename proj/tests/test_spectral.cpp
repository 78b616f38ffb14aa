#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "test_support.hpp"

using nsdp::SymMatrix;
using nsdp::SymSpectrum;

namespace {

TEST(Decompose, DiagonalClassification) {
  SymMatrix m(3);
  m.ref(0, 0) = 2.0;
  m.ref(1, 1) = 0.0;
  m.ref(2, 2) = -1.0;
  SymSpectrum s = nsdp::decompose(m, 1e-10);
  ASSERT_EQ(s.eigenvalues.size(), 3);
  EXPECT_DOUBLE_EQ(s.eigenvalues[0], 2.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[1], 0.0);
  EXPECT_DOUBLE_EQ(s.eigenvalues[2], -1.0);
  EXPECT_EQ(s.alpha, (std::vector<int>{0}));
  EXPECT_EQ(s.beta, (std::vector<int>{1}));
  EXPECT_EQ(s.gamma, (std::vector<int>{2}));
  EXPECT_DOUBLE_EQ(s.tol_used, 1e-10);
}

TEST(Decompose, ReconstructsAndOrders) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 5);
    SymMatrix m = testsupport::random_sym(n, rng);
    SymSpectrum s = nsdp::decompose(m);
    for (int i = 0; i + 1 < n; ++i)
      EXPECT_GE(s.eigenvalues[i], s.eigenvalues[i + 1]);
    Eigen::MatrixXd gram = s.basis.transpose() * s.basis;
    EXPECT_LT((gram - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
    Eigen::MatrixXd rebuilt =
        s.basis * s.eigenvalues.asDiagonal() * s.basis.transpose();
    EXPECT_LT((rebuilt - m.dense()).norm(), 1e-11 * std::max(1.0, m.dense().norm()));
  }
}

TEST(Decompose, TwoByTwoAgainstClosedForm) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    SymMatrix m = testsupport::random_sym(2, rng);
    auto [hi, lo] = testsupport::eig2(m(0, 0), m(1, 0), m(1, 1));
    SymSpectrum s = nsdp::decompose(m);
    EXPECT_NEAR(s.eigenvalues[0], hi, 1e-12 * std::max(1.0, std::abs(hi)));
    EXPECT_NEAR(s.eigenvalues[1], lo, 1e-12 * std::max(1.0, std::abs(lo)));
  }
}

TEST(Decompose, DeterministicUnderRepeatedEigenvalues) {
  SymMatrix m = SymMatrix::identity(4);
  SymSpectrum a = nsdp::decompose(m);
  SymSpectrum b = nsdp::decompose(m);
  EXPECT_EQ((a.basis - b.basis).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Decompose, NegativeToleranceThrows) {
  EXPECT_THROW(nsdp::decompose(SymMatrix::identity(2), -1.0),
               std::invalid_argument);
}

TEST(Decompose, BoundaryEigenvalueLandsInBeta) {
  SymMatrix m(2);
  m.ref(0, 0) = 1.0;
  m.ref(1, 1) = 1e-8;
  SymSpectrum s = nsdp::decompose(m, 1e-8);
  EXPECT_EQ(s.alpha.size(), 1u);
  EXPECT_EQ(s.beta.size(), 1u);
  EXPECT_TRUE(s.gamma.empty());
}

TEST(Decompose, EmptyMatrix) {
  SymSpectrum s = nsdp::decompose(SymMatrix(0));
  EXPECT_EQ(s.eigenvalues.size(), 0);
  EXPECT_EQ(s.basis.rows(), 0);
  EXPECT_TRUE(s.alpha.empty());
  EXPECT_TRUE(s.beta.empty());
  EXPECT_TRUE(s.gamma.empty());
}

TEST(ProjectPsd, TwoByTwoClosedForm) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    SymMatrix m = testsupport::random_sym(2, rng);
    SymMatrix pi = nsdp::project_psd(m);
    // Independent route: clip the closed-form spectrum.
    auto [hi, lo] = testsupport::eig2(m(0, 0), m(1, 0), m(1, 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense());
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd want =
        es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    EXPECT_LT((pi.dense() - want).norm(), 1e-12 * std::max(1.0, want.norm()));
    EXPECT_NEAR(hi, es.eigenvalues()[1], 1e-10);
    EXPECT_NEAR(lo, es.eigenvalues()[0], 1e-10);
  }
}

TEST(ProjectPsd, MoreauProperties) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    SymMatrix m = testsupport::random_sym(n, rng, 2.0);
    SymMatrix pos = nsdp::project_psd(m);
    SymMatrix negrefl = nsdp::project_psd(-1.0 * m);
    SymMatrix diff = pos - negrefl;
    EXPECT_LT((diff - m).frobenius_norm(), 1e-12 * std::max(1.0, m.frobenius_norm()));
    EXPECT_LT(std::abs(nsdp::inner(pos, negrefl)), 1e-10);
    SymMatrix again = nsdp::project_psd(pos);
    EXPECT_LT((again - pos).frobenius_norm(), 1e-12 * std::max(1.0, pos.frobenius_norm()));
  }
}

TEST(Pseudoinverse, PenroseOnRandom) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::VectorXd eigs = testsupport::random_vector(n, rng);
    for (int i = 0; i < n; ++i)
      if (std::abs(eigs[i]) < 0.1) eigs[i] = (eigs[i] < 0 ? -0.5 : 0.5);
    SymMatrix m = testsupport::sym_with_eigenvalues(eigs, rng);
    SymMatrix pinv = nsdp::pseudoinverse(m);
    Eigen::MatrixXd md = m.dense(), pd = pinv.dense();
    EXPECT_LT((md * pd * md - md).norm(), 1e-10 * std::max(1.0, md.norm()));
    EXPECT_LT((pd * md * pd - pd).norm(), 1e-10 * std::max(1.0, pd.norm()));
  }
}

TEST(Pseudoinverse, DropsNearZeroEigenvalues) {
  SymMatrix m(2);
  m.ref(0, 0) = 5.0;
  m.ref(1, 1) = 1e-20;
  SymMatrix pinv = nsdp::pseudoinverse(m);
  EXPECT_NEAR(pinv(0, 0), 0.2, 1e-14);
  EXPECT_DOUBLE_EQ(pinv(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(pinv(1, 0), 0.0);
}

TEST(Jordan, FrozenProduct) {
  SymMatrix a(2, {1.0, 2.0, 3.0});
  SymMatrix b(2, {0.0, 1.0, 4.0});
  SymMatrix j = nsdp::jordan(a, b);
  // (AB + BA)/2 with AB = [[2, 9], [3, 14]].
  EXPECT_DOUBLE_EQ(j(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(j(1, 0), 6.0);
  EXPECT_DOUBLE_EQ(j(1, 1), 14.0);
}

TEST(Jordan, OrderMismatchThrows) {
  EXPECT_THROW(nsdp::jordan(SymMatrix(2), SymMatrix(3)), std::invalid_argument);
}

TEST(ClarkeApply, FrozenDiagonalCase) {
  SymMatrix m(2);
  m.ref(0, 0) = 2.0;
  m.ref(1, 1) = -1.0;
  SymMatrix h(2, {1.0, 2.0, 3.0});
  SymMatrix v = nsdp::clarke_psd_apply(m, h);
  EXPECT_NEAR(v(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(v(1, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(v(1, 1), 3.0, 1e-15);
}

TEST(ClarkeApply, ZeroEigenvalueBlock) {
  SymMatrix m(2);
  m.ref(0, 0) = 5.0;
  m.ref(1, 1) = 0.0;
  SymMatrix h(2, {1.0, 2.0, 3.0});
  SymMatrix v = nsdp::clarke_psd_apply(m, h);
  EXPECT_NEAR(v(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(v(1, 0), 0.0, 1e-15);
  EXPECT_NEAR(v(1, 1), 3.0, 1e-15);
}

TEST(ClarkeApply, TinyEigenvalueClampsLikeZero) {
  SymMatrix m(2);
  m.ref(0, 0) = 3.0;
  m.ref(1, 1) = 1e-12;
  SymMatrix h(2, {1.0, 2.0, 3.0});
  SymMatrix v = nsdp::clarke_psd_apply(m, h);
  EXPECT_NEAR(v(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(v(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(v(1, 1), 3.0, 1e-12);
}

TEST(ClarkeApply, MatchesProjectionDirectionalDerivative) {
  std::mt19937_64 rng(16);
  const double t = 1e-6;
  int tested = 0;
  while (tested < 25) {
    const int n = 2 + static_cast<int>(rng() % 3);
    Eigen::VectorXd eigs = testsupport::random_vector(n, rng, 2.0);
    bool separated = true;
    for (int i = 0; i < n && separated; ++i) {
      if (std::abs(eigs[i]) < 0.05) separated = false;
      for (int j = i + 1; j < n; ++j)
        if (std::abs(eigs[i] - eigs[j]) < 0.1) separated = false;
    }
    if (!separated) continue;
    ++tested;
    SymMatrix m = testsupport::sym_with_eigenvalues(eigs, rng);
    SymMatrix h = testsupport::random_sym(n, rng);
    SymMatrix neg = -1.0 * m;
    SymMatrix th = h;
    th *= t;
    SymMatrix fd = nsdp::project_psd(neg + th) - nsdp::project_psd(neg - th);
    fd *= 1.0 / (2.0 * t);
    SymMatrix v = nsdp::clarke_psd_apply(m, h);
    EXPECT_LT((fd - v).frobenius_norm(), 1e-5 * std::max(1.0, h.frobenius_norm()));
  }
}

TEST(ClarkeApply, LinearAndSelfAdjoint) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 3);
    SymMatrix m = testsupport::random_sym(n, rng, 2.0);
    SymMatrix h1 = testsupport::random_sym(n, rng);
    SymMatrix h2 = testsupport::random_sym(n, rng);
    SymMatrix combo = h1;
    combo *= 2.5;
    SymMatrix h2s = h2;
    h2s *= -0.75;
    combo += h2s;
    SymMatrix lhs = nsdp::clarke_psd_apply(m, combo);
    SymMatrix rhs = nsdp::clarke_psd_apply(m, h1);
    rhs *= 2.5;
    SymMatrix vh2 = nsdp::clarke_psd_apply(m, h2);
    vh2 *= -0.75;
    rhs += vh2;
    EXPECT_LT((lhs - rhs).frobenius_norm(), 1e-10);
    const double fwd = nsdp::inner(nsdp::clarke_psd_apply(m, h1), h2);
    const double bwd = nsdp::inner(h1, nsdp::clarke_psd_apply(m, h2));
    EXPECT_NEAR(fwd, bwd, 1e-10 * std::max(1.0, std::abs(fwd)));
  }
}

TEST(ClarkeApply, EmptyMatrix) {
  SymMatrix v = nsdp::clarke_psd_apply(SymMatrix(0), SymMatrix(0));
  EXPECT_EQ(v.order(), 0);
}

TEST(DefaultTolerance, ScalesWithSpectrum) {
  SymMatrix small = SymMatrix::identity(2);
  SymMatrix big = SymMatrix::identity(2);
  big *= 1e6;
  EXPECT_DOUBLE_EQ(nsdp::default_eig_tol(small), 1e-8);
  EXPECT_DOUBLE_EQ(nsdp::default_eig_tol(big), 1e-2);
}

}  // namespace
