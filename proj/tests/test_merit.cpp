#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

using nsdp::ProblemInstance;

namespace {

TEST(Violation, FrozenSquaredScalar) {
  // G(-1) = -1, so the infeasibility is the full eigenvalue: P = 1/2.
  ProblemInstance inst = nsdp::corpus_instance("squared-scalar");
  nsdp::ViolationEval v =
      nsdp::violation_eval(inst, Eigen::VectorXd::Constant(1, -1.0));
  EXPECT_DOUBLE_EQ(v.p_value, 0.5);
  EXPECT_DOUBLE_EQ(v.gradient[0], -2.0);
}

TEST(Violation, ZeroOnStrictlyFeasiblePoints) {
  ProblemInstance inst = nsdp::corpus_instance("neg-curvature");
  Eigen::VectorXd x = (Eigen::VectorXd(2) << 0.5, 0.0).finished();
  nsdp::ViolationEval v = nsdp::violation_eval(inst, x);
  EXPECT_DOUBLE_EQ(v.p_value, 0.0);
  EXPECT_DOUBLE_EQ(v.gradient.norm(), 0.0);
}

TEST(Violation, EqualityOnlyInstance) {
  ProblemInstance inst = testsupport::line_equality_instance();
  nsdp::ViolationEval v =
      nsdp::violation_eval(inst, Eigen::VectorXd::Constant(1, 3.0));
  EXPECT_DOUBLE_EQ(v.p_value, 4.5);
  EXPECT_DOUBLE_EQ(v.gradient[0], 3.0);
}

TEST(Penalty, FrozenSquaredScalar) {
  ProblemInstance inst = nsdp::corpus_instance("squared-scalar");
  nsdp::PenaltyEval pe =
      nsdp::penalty_eval(inst, Eigen::VectorXd::Constant(1, -1.0), 2.0);
  EXPECT_DOUBLE_EQ(pe.value, 0.0);
  EXPECT_DOUBLE_EQ(pe.gradient[0], -3.0);
  EXPECT_DOUBLE_EQ(pe.rho, 2.0);
}

TEST(PenaltyHessian, FrozenSquaredScalar) {
  ProblemInstance inst = nsdp::corpus_instance("squared-scalar");
  Eigen::MatrixXd h = nsdp::penalty_hessian_element(
      inst, Eigen::VectorXd::Constant(1, -1.0), 2.0);
  ASSERT_EQ(h.rows(), 1);
  EXPECT_DOUBLE_EQ(h(0, 0), 12.0);
}

TEST(PenaltyHessian, ZeroMatrixDirectionalDerivativeConvention) {
  // At the origin of affine-2x2 the cone value vanishes identically, the
  // 0/0 slope resolves to 1, and the element is (2 + rho) I.
  ProblemInstance inst = nsdp::corpus_instance("affine-2x2");
  Eigen::MatrixXd h =
      nsdp::penalty_hessian_element(inst, Eigen::VectorXd::Zero(2), 5.0);
  EXPECT_DOUBLE_EQ(h(0, 0), 7.0);
  EXPECT_DOUBLE_EQ(h(1, 1), 7.0);
  EXPECT_DOUBLE_EQ(h(0, 1), 0.0);
  EXPECT_DOUBLE_EQ(h(1, 0), 0.0);
}

TEST(PenaltyHessian, ExactlySymmetric) {
  std::mt19937_64 rng(21);
  for (const std::string& name : nsdp::corpus_names()) {
    ProblemInstance inst = nsdp::corpus_instance(name);
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::VectorXd x = testsupport::random_vector(inst.n, rng);
      Eigen::MatrixXd h = nsdp::penalty_hessian_element(inst, x, 10.0);
      EXPECT_EQ((h - h.transpose()).norm(), 0.0) << name;
    }
  }
}

TEST(Penalty, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(22);
  const double step = 1e-6;
  for (const std::string& name : nsdp::corpus_names()) {
    ProblemInstance inst = nsdp::corpus_instance(name);
    int accepted = 0;
    while (accepted < 10) {
      Eigen::VectorXd x = testsupport::random_vector(inst.n, rng, 0.8);
      if (testsupport::min_abs_cone_eigenvalue(inst, x) <= 1e-3) continue;
      ++accepted;
      nsdp::ViolationEval v = nsdp::violation_eval(inst, x);
      Eigen::VectorXd fd = testsupport::fd_gradient(
          [&](const Eigen::VectorXd& y) {
            return nsdp::violation_eval(inst, y).p_value;
          },
          x, step);
      EXPECT_LT((fd - v.gradient).norm(),
                1e-6 * std::max(1.0, v.gradient.norm()))
          << name;
    }
  }
}

TEST(PenaltyHessian, MatchesGradientDifferences) {
  std::mt19937_64 rng(23);
  const double step = 1e-6;
  const double rho = 3.0;
  for (const std::string& name : nsdp::corpus_names()) {
    ProblemInstance inst = nsdp::corpus_instance(name);
    int accepted = 0;
    while (accepted < 8) {
      Eigen::VectorXd x = testsupport::random_vector(inst.n, rng, 0.7);
      if (testsupport::min_abs_cone_eigenvalue(inst, x) <= 1e-3) continue;
      ++accepted;
      Eigen::MatrixXd hbar = nsdp::penalty_hessian_element(inst, x, rho);
      Eigen::VectorXd d = testsupport::random_vector(inst.n, rng);
      d.normalize();
      Eigen::VectorXd gp =
          nsdp::penalty_eval(inst, x + step * d, rho).gradient;
      Eigen::VectorXd gm =
          nsdp::penalty_eval(inst, x - step * d, rho).gradient;
      Eigen::VectorXd fd = (gp - gm) / (2.0 * step);
      Eigen::VectorXd hd = hbar * d;
      EXPECT_LT((fd - hd).norm(), 1e-5 * std::max(1.0, hd.norm())) << name;
    }
  }
}

TEST(RegularizedPenalty, AddsQuarticProximalTerm) {
  ProblemInstance inst = nsdp::corpus_instance("affine-2x2");
  Eigen::VectorXd x = (Eigen::VectorXd(2) << 1.0, 2.0).finished();
  Eigen::VectorXd ref = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
  const double rho = 4.0;
  nsdp::PenaltyEval base = nsdp::penalty_eval(inst, x, rho);
  auto [value, grad] = nsdp::regularized_penalty_eval(inst, x, ref, rho);
  Eigen::VectorXd d = x - ref;
  EXPECT_DOUBLE_EQ(value, base.value + 0.25 * std::pow(d.squaredNorm(), 2));
  EXPECT_LT((grad - (base.gradient + d.squaredNorm() * d)).norm(), 1e-14);

  auto [at_ref, grad_ref] = nsdp::regularized_penalty_eval(inst, ref, ref, rho);
  nsdp::PenaltyEval plain = nsdp::penalty_eval(inst, ref, rho);
  EXPECT_DOUBLE_EQ(at_ref, plain.value);
  EXPECT_EQ(grad_ref, plain.gradient);
}

}  // namespace
