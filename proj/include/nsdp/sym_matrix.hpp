#pragma once

// Symmetric matrices stored as the packed lower triangle, row-major:
// entry (i,j) with i >= j lives at offset i*(i+1)/2 + j.  This is the
// storage format used throughout the library and in the instance files.

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nsdp {

class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(int order)
      : order_(order), packed_(packed_size(order), 0.0) {
    if (order < 0) throw std::invalid_argument("SymMatrix: negative order");
  }

  SymMatrix(int order, std::vector<double> packed)
      : order_(order), packed_(std::move(packed)) {
    if (order < 0) throw std::invalid_argument("SymMatrix: negative order");
    if (packed_.size() != packed_size(order))
      throw std::invalid_argument("SymMatrix: packed data has wrong length");
  }

  static std::size_t packed_size(int order) {
    return static_cast<std::size_t>(order) * (order + 1) / 2;
  }

  static SymMatrix identity(int order) {
    SymMatrix s(order);
    for (int i = 0; i < order; ++i) s.ref(i, i) = 1.0;
    return s;
  }

  // Accepts a numerically symmetric dense matrix; rejects anything whose
  // asymmetry exceeds a small multiple of its scale.
  static SymMatrix from_dense(const Eigen::MatrixXd& a) {
    check_square(a);
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument("SymMatrix::from_dense: matrix not symmetric");
    return take_lower(a);
  }

  // Builds from (A + A^T)/2; use for products that are symmetric only in
  // exact arithmetic.
  static SymMatrix symmetrize(const Eigen::MatrixXd& a) {
    check_square(a);
    return take_lower(0.5 * (a + a.transpose()));
  }

  int order() const { return order_; }

  double operator()(int i, int j) const {
    return i >= j ? packed_[idx(i, j)] : packed_[idx(j, i)];
  }

  // Mutable access to the stored lower-triangle entry, i >= j.
  double& ref(int i, int j) {
    if (i < j) std::swap(i, j);
    return packed_[idx(i, j)];
  }

  const std::vector<double>& packed() const { return packed_; }
  std::vector<double>& packed() { return packed_; }

  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd a(order_, order_);
    for (int i = 0; i < order_; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = packed_[idx(i, j)];
    return a;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (int i = 0; i < order_; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = packed_[idx(i, j)];
        s += (i == j) ? v * v : 2.0 * v * v;
      }
    return std::sqrt(s);
  }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same_order(o);
    for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] += o.packed_[k];
    return *this;
  }

  SymMatrix& operator-=(const SymMatrix& o) {
    check_same_order(o);
    for (std::size_t k = 0; k < packed_.size(); ++k) packed_[k] -= o.packed_[k];
    return *this;
  }

  SymMatrix& operator*=(double t) {
    for (double& v : packed_) v *= t;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(double t, SymMatrix a) { return a *= t; }

 private:
  static void check_square(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols())
      throw std::invalid_argument("SymMatrix: dense source not square");
  }

  static SymMatrix take_lower(const Eigen::MatrixXd& a) {
    SymMatrix s(static_cast<int>(a.rows()));
    for (int i = 0; i < s.order_; ++i)
      for (int j = 0; j <= i; ++j) s.packed_[idx(i, j)] = a(i, j);
    return s;
  }

  void check_same_order(const SymMatrix& o) const {
    if (o.order_ != order_)
      throw std::invalid_argument("SymMatrix: order mismatch");
  }

  static std::size_t idx(int i, int j) {
    return static_cast<std::size_t>(i) * (i + 1) / 2 + j;
  }

  int order_ = 0;
  std::vector<double> packed_;
};

// Trace inner product <A,B> = sum_ij A_ij B_ij.
inline double inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order())
    throw std::invalid_argument("inner: order mismatch");
  double s = 0.0;
  for (int i = 0; i < a.order(); ++i) {
    s += a(i, i) * b(i, i);
    for (int j = 0; j < i; ++j) s += 2.0 * a(i, j) * b(i, j);
  }
  return s;
}

}  // namespace nsdp
