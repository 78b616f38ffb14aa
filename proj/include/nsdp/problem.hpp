#pragma once

// Problem data for dense nonlinear semidefinite programs
//
//   minimize f(x)   subject to   h(x) = 0,   G(x) PSD,
//
// with f: R^n -> R, h: R^n -> R^p, G: R^n -> S^m, all entries quadratic in x:
//
//   f(x)    = c0 + g^T x + x^T Hf x / 2
//   h_i(x)  = c_i + a_i^T x + x^T Q_i x / 2
//   G(x)    = A0 + sum_l x_l A_l + sum_{i<=j} x_i x_j B_ij.
//
// Instances round-trip through a JSON document with top-level keys
// name, n, p, m, objective{c0,g,Hf}, equalities[{c,a,Q}], cone{A0,A,B}.
// Symmetric matrices are stored packed (lower triangle, row-major); the B
// list is sparse with 1-based variable indices i <= j.
//
// Evaluation produces exact values and derivatives; any type exposing the
// same bundle through ProblemLike plugs into the rest of the library.

#include <Eigen/Core>

#include <concepts>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsdp/sym_matrix.hpp"

namespace nsdp {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct EvalBundle {
  Eigen::VectorXd x;

  double f_val = 0.0;
  Eigen::VectorXd grad_f;
  Eigen::MatrixXd hess_f;

  Eigen::VectorXd h_val;            // p
  Eigen::MatrixXd jac_h;            // p x n
  std::vector<Eigen::MatrixXd> hess_h;  // p entries, n x n

  SymMatrix g_val;                  // order m
  std::vector<SymMatrix> dg;        // n entries: dG/dx_l
  struct QuadTerm {
    int i = 0;  // 0-based, i <= j
    int j = 0;
    SymMatrix mat;
  };
  std::vector<QuadTerm> d2g;        // d^2 G / dx_i dx_j, sparse, i <= j
};

// Adjoint of the cone Jacobian: (DG(x)* [W])_l = <dG_l, W>.
inline Eigen::VectorXd dg_adjoint(const EvalBundle& b, const SymMatrix& w) {
  Eigen::VectorXd out(b.x.size());
  for (int l = 0; l < b.x.size(); ++l) out[l] = inner(b.dg[l], w);
  return out;
}

// Adjoint of the cone second derivative: (D^2G(x)* [W])_ij = <d2G_ij, W>.
inline Eigen::MatrixXd d2g_adjoint(const EvalBundle& b, const SymMatrix& w) {
  const int n = static_cast<int>(b.x.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : b.d2g) {
    const double v = inner(t.mat, w);
    out(t.i, t.j) += v;
    if (t.i != t.j) out(t.j, t.i) += v;
  }
  return out;
}

// Directional cone derivative DG(x)[d] = sum_l d_l dG_l.
inline SymMatrix dg_apply(const EvalBundle& b, const Eigen::VectorXd& d) {
  SymMatrix out(b.g_val.order());
  for (int l = 0; l < d.size(); ++l) {
    SymMatrix t = b.dg[l];
    t *= d[l];
    out += t;
  }
  return out;
}

template <typename P>
concept ProblemLike = requires(const P& p, const Eigen::VectorXd& x) {
  { p.dim_n() } -> std::convertible_to<int>;
  { p.dim_p() } -> std::convertible_to<int>;
  { p.dim_m() } -> std::convertible_to<int>;
  { p.eval(x) } -> std::convertible_to<EvalBundle>;
};

struct QuadraticScalar {
  double c = 0.0;
  Eigen::VectorXd a;
  SymMatrix q;  // order n

  double value(const Eigen::VectorXd& x) const {
    return c + a.dot(x) + 0.5 * x.dot(q.dense() * x);
  }
};

struct ConeQuadTerm {
  int i = 0;  // 0-based, i <= j
  int j = 0;
  SymMatrix mat;  // order m
};

class ProblemInstance {
 public:
  std::string name;
  int n = 0;
  int p = 0;
  int m = 0;

  QuadraticScalar objective;               // c0, g, Hf
  std::vector<QuadraticScalar> equalities;  // p entries
  SymMatrix cone_const;                     // A0, order m
  std::vector<SymMatrix> cone_lin;          // n entries, order m
  std::vector<ConeQuadTerm> cone_quad;      // sparse, i <= j

  int dim_n() const { return n; }
  int dim_p() const { return p; }
  int dim_m() const { return m; }

  EvalBundle eval(const Eigen::VectorXd& x) const {
    if (x.size() != n)
      throw std::invalid_argument("eval: point has wrong dimension");
    EvalBundle b;
    b.x = x;

    Eigen::MatrixXd hf = objective.q.dense();
    b.f_val = objective.value(x);
    b.grad_f = objective.a + hf * x;
    b.hess_f = hf;

    b.h_val.resize(p);
    b.jac_h.resize(p, n);
    b.hess_h.reserve(p);
    for (int i = 0; i < p; ++i) {
      Eigen::MatrixXd qi = equalities[i].q.dense();
      b.h_val[i] = equalities[i].value(x);
      b.jac_h.row(i) = (equalities[i].a + qi * x).transpose();
      b.hess_h.push_back(std::move(qi));
    }

    b.g_val = cone_const;
    b.dg = cone_lin;
    for (const auto& t : cone_quad) {
      SymMatrix s = t.mat;
      s *= x[t.i] * x[t.j] * (t.i == t.j ? 0.5 : 1.0);
      b.g_val += s;

      SymMatrix di = t.mat;
      di *= x[t.j];
      b.dg[t.i] += di;
      if (t.i != t.j) {
        SymMatrix dj = t.mat;
        dj *= x[t.i];
        b.dg[t.j] += dj;
      }
      b.d2g.push_back({t.i, t.j, t.mat});
    }
    for (int l = 0; l < n; ++l) {
      SymMatrix lin = cone_lin[l];
      lin *= x[l];
      b.g_val += lin;
    }
    return b;
  }
};

static_assert(ProblemLike<ProblemInstance>);

// Evaluation hook for problems whose data is not quadratic: the callback
// returns a full bundle and the dimensions are fixed up front.
class CallbackProblem {
 public:
  CallbackProblem(int n, int p, int m,
                  std::function<EvalBundle(const Eigen::VectorXd&)> fn)
      : n_(n), p_(p), m_(m), fn_(std::move(fn)) {}

  int dim_n() const { return n_; }
  int dim_p() const { return p_; }
  int dim_m() const { return m_; }
  EvalBundle eval(const Eigen::VectorXd& x) const { return fn_(x); }

 private:
  int n_ = 0, p_ = 0, m_ = 0;
  std::function<EvalBundle(const Eigen::VectorXd&)> fn_;
};

static_assert(ProblemLike<CallbackProblem>);

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline const ordered_json& expect(const ordered_json& j, const std::string& key,
                                  const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ParseError(path.empty() ? "missing key '" + key + "'"
                                  : path + ": missing key '" + key + "'");
  return j.at(key);
}

inline double expect_number(const ordered_json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path + ": expected a number");
  return j.get<double>();
}

inline int expect_int(const ordered_json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw ParseError(path + ": expected an integer");
  return j.get<int>();
}

inline Eigen::VectorXd expect_vector(const ordered_json& j, int len,
                                     const std::string& path,
                                     const std::string& len_name) {
  if (!j.is_array() || static_cast<int>(j.size()) != len)
    throw ParseError(path + ": expected array of length " + len_name);
  Eigen::VectorXd v(len);
  for (int i = 0; i < len; ++i) v[i] = expect_number(j.at(i), path);
  return v;
}

inline SymMatrix expect_packed(const ordered_json& j, int order,
                               const std::string& path,
                               const std::string& size_name) {
  const std::size_t want = SymMatrix::packed_size(order);
  if (!j.is_array() || j.size() != want)
    throw ParseError(path + ": expected " + size_name + " entries");
  std::vector<double> packed(want);
  for (std::size_t k = 0; k < want; ++k)
    packed[k] = expect_number(j.at(k), path);
  return SymMatrix(order, std::move(packed));
}

inline ordered_json packed_json(const SymMatrix& s) {
  return ordered_json(s.packed());
}

inline ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

}  // namespace detail

inline ProblemInstance parse_instance(const std::string& text) {
  using detail::expect;
  using detail::expect_int;
  using detail::expect_number;
  using detail::expect_packed;
  using detail::expect_vector;
  detail::ordered_json j;
  try {
    j = detail::ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("top level: expected an object");

  ProblemInstance inst;
  const auto& nm = expect(j, "name", "");
  if (!nm.is_string()) throw ParseError("name: expected a string");
  inst.name = nm.get<std::string>();
  inst.n = expect_int(expect(j, "n", ""), "n");
  inst.p = expect_int(expect(j, "p", ""), "p");
  inst.m = expect_int(expect(j, "m", ""), "m");
  if (inst.n < 1) throw ParseError("n: must be at least 1");
  if (inst.p < 0) throw ParseError("p: must be nonnegative");
  if (inst.m < 0) throw ParseError("m: must be nonnegative");

  const auto& obj = expect(j, "objective", "");
  inst.objective.c = expect_number(expect(obj, "c0", "objective"),
                                   "objective.c0");
  inst.objective.a =
      expect_vector(expect(obj, "g", "objective"), inst.n, "objective.g", "n");
  inst.objective.q = expect_packed(expect(obj, "Hf", "objective"), inst.n,
                                   "objective.Hf", "n(n+1)/2");

  const auto& eqs = expect(j, "equalities", "");
  if (!eqs.is_array() || static_cast<int>(eqs.size()) != inst.p)
    throw ParseError("equalities: expected array of length p");
  for (int i = 0; i < inst.p; ++i) {
    const std::string path = "equalities[" + std::to_string(i) + "]";
    const auto& e = eqs.at(i);
    QuadraticScalar q;
    q.c = expect_number(expect(e, "c", path), path + ".c");
    q.a = expect_vector(expect(e, "a", path), inst.n, path + ".a", "n");
    q.q = expect_packed(expect(e, "Q", path), inst.n, path + ".Q", "n(n+1)/2");
    inst.equalities.push_back(std::move(q));
  }

  const auto& cone = expect(j, "cone", "");
  inst.cone_const =
      expect_packed(expect(cone, "A0", "cone"), inst.m, "cone.A0", "m(m+1)/2");
  const auto& as = expect(cone, "A", "cone");
  if (!as.is_array() || static_cast<int>(as.size()) != inst.n)
    throw ParseError("cone.A: expected array of length n");
  for (int l = 0; l < inst.n; ++l) {
    inst.cone_lin.push_back(expect_packed(
        as.at(l), inst.m, "cone.A[" + std::to_string(l) + "]", "m(m+1)/2"));
  }
  const auto& bs = expect(cone, "B", "cone");
  if (!bs.is_array()) throw ParseError("cone.B: expected an array");
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const std::string path = "cone.B[" + std::to_string(k) + "]";
    const auto& t = bs.at(k);
    ConeQuadTerm term;
    term.i = expect_int(expect(t, "i", path), path + ".i");
    term.j = expect_int(expect(t, "j", path), path + ".j");
    if (term.i < 1 || term.j < 1 || term.i > inst.n || term.j > inst.n)
      throw ParseError(path + ": indices must lie in 1..n");
    if (term.i > term.j)
      throw ParseError(path + ": indices must satisfy i <= j");
    term.i -= 1;
    term.j -= 1;
    term.mat = expect_packed(expect(t, "mat", path), inst.m, path + ".mat",
                             "m(m+1)/2");
    inst.cone_quad.push_back(std::move(term));
  }
  return inst;
}

inline std::string serialize_instance(const ProblemInstance& inst) {
  using detail::ordered_json;
  ordered_json j;
  j["name"] = inst.name;
  j["n"] = inst.n;
  j["p"] = inst.p;
  j["m"] = inst.m;
  ordered_json obj;
  obj["c0"] = inst.objective.c;
  obj["g"] = detail::vector_json(inst.objective.a);
  obj["Hf"] = detail::packed_json(inst.objective.q);
  j["objective"] = std::move(obj);
  ordered_json eqs = ordered_json::array();
  for (const auto& e : inst.equalities) {
    ordered_json q;
    q["c"] = e.c;
    q["a"] = detail::vector_json(e.a);
    q["Q"] = detail::packed_json(e.q);
    eqs.push_back(std::move(q));
  }
  j["equalities"] = std::move(eqs);
  ordered_json cone;
  cone["A0"] = detail::packed_json(inst.cone_const);
  ordered_json as = ordered_json::array();
  for (const auto& a : inst.cone_lin) as.push_back(detail::packed_json(a));
  cone["A"] = std::move(as);
  ordered_json bs = ordered_json::array();
  for (const auto& t : inst.cone_quad) {
    ordered_json b;
    b["i"] = t.i + 1;
    b["j"] = t.j + 1;
    b["mat"] = detail::packed_json(t.mat);
    bs.push_back(std::move(b));
  }
  cone["B"] = std::move(bs);
  j["cone"] = std::move(cone);
  return j.dump(2) + "\n";
}

namespace detail {

inline ProblemInstance make_squared_scalar() {
  // f = x, G = -x^2 in S^1: feasible set {0}, strict complementarity fails.
  ProblemInstance inst;
  inst.name = "squared-scalar";
  inst.n = 1;
  inst.p = 0;
  inst.m = 1;
  inst.objective.a = Eigen::VectorXd::Constant(1, 1.0);
  inst.objective.q = SymMatrix(1);
  inst.cone_const = SymMatrix(1);
  inst.cone_lin = {SymMatrix(1)};
  inst.cone_quad = {{0, 0, SymMatrix(1, {-2.0})}};
  return inst;
}

inline ProblemInstance make_degenerate_equality() {
  // f = x, h = x^2: multiplier blows up, only asymptotic certificates exist.
  ProblemInstance inst;
  inst.name = "degenerate-equality";
  inst.n = 1;
  inst.p = 1;
  inst.m = 1;
  inst.objective.a = Eigen::VectorXd::Constant(1, 1.0);
  inst.objective.q = SymMatrix(1);
  QuadraticScalar h;
  h.a = Eigen::VectorXd::Zero(1);
  h.q = SymMatrix(1, {2.0});
  inst.equalities = {std::move(h)};
  inst.cone_const = SymMatrix(1, {1.0});
  inst.cone_lin = {SymMatrix(1)};
  return inst;
}

inline ProblemInstance make_lsdp_strict() {
  // Linear SDP with a unique KKT point satisfying strict complementarity:
  // f = x1, h = x2 - 2, G = [[x1, 1], [1, x2]].
  ProblemInstance inst;
  inst.name = "lsdp-strict";
  inst.n = 2;
  inst.p = 1;
  inst.m = 2;
  inst.objective.a = (Eigen::VectorXd(2) << 1.0, 0.0).finished();
  inst.objective.q = SymMatrix(2);
  QuadraticScalar h;
  h.c = -2.0;
  h.a = (Eigen::VectorXd(2) << 0.0, 1.0).finished();
  h.q = SymMatrix(2);
  inst.equalities = {std::move(h)};
  inst.cone_const = SymMatrix(2, {0.0, 1.0, 0.0});
  inst.cone_lin = {SymMatrix(2, {1.0, 0.0, 0.0}), SymMatrix(2, {0.0, 0.0, 1.0})};
  return inst;
}

inline ProblemInstance make_affine_2x2() {
  // Strictly feasible diagonal SDP: f = x1^2 + (x2-1)^2, G = diag(x1, x2).
  ProblemInstance inst;
  inst.name = "affine-2x2";
  inst.n = 2;
  inst.p = 0;
  inst.m = 2;
  inst.objective.c = 1.0;
  inst.objective.a = (Eigen::VectorXd(2) << 0.0, -2.0).finished();
  inst.objective.q = SymMatrix(2, {2.0, 0.0, 2.0});
  inst.cone_const = SymMatrix(2);
  inst.cone_lin = {SymMatrix(2, {1.0, 0.0, 0.0}), SymMatrix(2, {0.0, 0.0, 1.0})};
  return inst;
}

inline ProblemInstance make_neg_curvature() {
  // f = -|x|^2, G = 1 - |x|^2 in S^1: minimizers on the unit circle, the
  // Lagrangian Hessian alone is indefinite and the sigma-term is required.
  ProblemInstance inst;
  inst.name = "neg-curvature";
  inst.n = 2;
  inst.p = 0;
  inst.m = 1;
  inst.objective.a = Eigen::VectorXd::Zero(2);
  inst.objective.q = SymMatrix(2, {-2.0, 0.0, -2.0});
  inst.cone_const = SymMatrix(1, {1.0});
  inst.cone_lin = {SymMatrix(1), SymMatrix(1)};
  inst.cone_quad = {{0, 0, SymMatrix(1, {-2.0})},
                    {1, 1, SymMatrix(1, {-2.0})}};
  return inst;
}

}  // namespace detail

inline std::vector<std::string> corpus_names() {
  return {"squared-scalar", "degenerate-equality", "lsdp-strict", "affine-2x2",
          "neg-curvature"};
}

inline ProblemInstance corpus_instance(const std::string& name) {
  if (name == "squared-scalar") return detail::make_squared_scalar();
  if (name == "degenerate-equality") return detail::make_degenerate_equality();
  if (name == "lsdp-strict") return detail::make_lsdp_strict();
  if (name == "affine-2x2") return detail::make_affine_2x2();
  if (name == "neg-curvature") return detail::make_neg_curvature();
  std::ostringstream os;
  os << "unknown corpus instance '" << name << "'; available:";
  for (const auto& nm : corpus_names()) os << " " << nm;
  throw std::invalid_argument(os.str());
}

}  // namespace nsdp
