#pragma once

// Perturbed saddle-point data model 𝒜 = [[A, Bᵀ], [B, −C]] and the fitted
// norms built from it:
//
//   ‖q‖²_Q = |q|²_Q + c(q,q)          Qbar = S_Q + C
//   ‖v‖²_V = |v|²_V + ‖Bv‖²_{Q'}      Vbar = S_V + Bᵀ Qbar⁻¹ B
//
// with combined metric 𝒩 = blockdiag(Vbar, Qbar).

#include <string>
#include <utility>
#include <vector>

#include "saddlecheck/linalg.hpp"

namespace saddlecheck {

/// Named sub-blocks of V or Q (e.g. {"u", 98}, {"w", 40}).
struct BlockLayout {
  std::vector<std::pair<std::string, int>> blocks;

  int size() const {
    int n = 0;
    for (const auto& b : blocks) n += b.second;
    return n;
  }
};

template <typename Scalar>
struct BlockSystem {
  SparseMatrix<Scalar> A;  // n_V × n_V, symmetric PSD
  SparseMatrix<Scalar> B;  // n_Q × n_V
  SparseMatrix<Scalar> C;  // n_Q × n_Q, symmetric PSD
  BlockLayout v_layout;
  BlockLayout q_layout;

  int n_v() const { return static_cast<int>(A.rows()); }
  int n_q() const { return static_cast<int>(C.rows()); }
  int size() const { return n_v() + n_q(); }
};

template <typename Scalar>
void validate(const BlockSystem<Scalar>& sys) {
  if (sys.A.rows() != sys.A.cols() || sys.C.rows() != sys.C.cols() ||
      sys.B.rows() != sys.C.rows() || sys.B.cols() != sys.A.rows())
    throw Error(ErrorCode::DimensionMismatch, "block sizes are inconsistent");
  require_symmetric(sys.A, "A");
  require_symmetric(sys.C, "C");
  for (int k = 0; k < sys.A.outerSize(); ++k)
    if (sys.A.coeff(k, k) < 0) throw Error(ErrorCode::NonSPD, "A has a negative diagonal entry");
  for (int k = 0; k < sys.C.outerSize(); ++k)
    if (sys.C.coeff(k, k) < 0) throw Error(ErrorCode::NonSPD, "C has a negative diagonal entry");
}

template <typename Scalar>
struct CombinedVector {
  VectorX<Scalar> u;
  VectorX<Scalar> p;

  VectorX<Scalar> stacked() const {
    VectorX<Scalar> x(u.size() + p.size());
    x << u, p;
    return x;
  }

  static CombinedVector split(const VectorX<Scalar>& x, Eigen::Index n_v) {
    return {x.head(n_v), x.tail(x.size() - n_v)};
  }
};

template <typename Scalar>
CombinedVector<Scalar> operator*(Scalar s, const CombinedVector<Scalar>& x) {
  return {s * x.u, s * x.p};
}

/// (Au + Bᵀp; Bu − Cp)
template <typename Scalar>
CombinedVector<Scalar> apply_block_operator(const BlockSystem<Scalar>& sys,
                                            const CombinedVector<Scalar>& x) {
  if (x.u.size() != sys.n_v() || x.p.size() != sys.n_q())
    throw Error(ErrorCode::DimensionMismatch, "vector does not match the block system");
  return {sys.A * x.u + sys.B.transpose() * x.p, sys.B * x.u - sys.C * x.p};
}

template <typename Scalar>
MatrixX<Scalar> block_operator_dense(const BlockSystem<Scalar>& sys) {
  const int nv = sys.n_v(), nq = sys.n_q();
  MatrixX<Scalar> m(nv + nq, nv + nq);
  m.topLeftCorner(nv, nv) = to_dense(sys.A);
  m.topRightCorner(nv, nq) = to_dense(sys.B).transpose();
  m.bottomLeftCorner(nq, nv) = to_dense(sys.B);
  m.bottomRightCorner(nq, nq) = -to_dense(sys.C);
  return m;
}

/// 𝒜((u;p),(v;q)) = a(u,v) + b(v,p) + b(u,q) − c(p,q)
template <typename Scalar>
Scalar bilinear_form(const BlockSystem<Scalar>& sys, const CombinedVector<Scalar>& x,
                     const CombinedVector<Scalar>& y) {
  const auto ax = apply_block_operator(sys, x);
  return ax.u.dot(y.u) + ax.p.dot(y.p);
}

template <typename Scalar>
struct FittedNorms {
  MatrixX<Scalar> S_Q;
  MatrixX<Scalar> S_V;
  MatrixX<Scalar> Qbar;
  MatrixX<Scalar> Vbar;
  CholeskyFactor<Scalar> Qbar_factor;
  CholeskyFactor<Scalar> Vbar_factor;

  int n_v() const { return static_cast<int>(Vbar.rows()); }
  int n_q() const { return static_cast<int>(Qbar.rows()); }

  /// 𝒩 = blockdiag(Vbar, Qbar)
  MatrixX<Scalar> combined_metric() const {
    const int nv = n_v(), nq = n_q();
    MatrixX<Scalar> m = MatrixX<Scalar>::Zero(nv + nq, nv + nq);
    m.topLeftCorner(nv, nv) = Vbar;
    m.bottomRightCorner(nq, nq) = Qbar;
    return m;
  }

  /// Replaces Qbar/Vbar by caller-supplied equivalent SPD metrics (the
  /// seminorms are kept). Only Vbar/Qbar consumers see the change.
  void replace_metrics(const MatrixX<Scalar>& qbar, const MatrixX<Scalar>& vbar) {
    if (qbar.rows() != n_q() || vbar.rows() != n_v())
      throw Error(ErrorCode::DimensionMismatch, "replacement metric has the wrong size");
    Qbar = qbar;
    Vbar = vbar;
    Qbar_factor.compute(Qbar);
    Vbar_factor.compute(Vbar);
  }
};

template <typename Scalar>
FittedNorms<Scalar> build_fitted_norms(const BlockSystem<Scalar>& sys, const MatrixX<Scalar>& s_q,
                                       const MatrixX<Scalar>& s_v) {
  validate(sys);
  if (s_q.rows() != sys.n_q() || s_q.cols() != sys.n_q() || s_v.rows() != sys.n_v() ||
      s_v.cols() != sys.n_v())
    throw Error(ErrorCode::DimensionMismatch, "seminorm matrices do not match the system");
  if (sys.n_v() > kDeskScaleLimit || sys.n_q() > kDeskScaleLimit)
    throw Error(ErrorCode::DeskScaleExceeded, "fitted norms are materialized densely");
  require_symmetric(s_q, "S_Q");
  require_symmetric(s_v, "S_V");

  FittedNorms<Scalar> out;
  out.S_Q = s_q;
  out.S_V = s_v;
  out.Qbar = s_q + to_dense(sys.C);
  // An empty Q block (no constraint) is vacuously SPD.
  if (sys.n_q() > 0 && !is_spd(out.Qbar)) throw Error(ErrorCode::QbarSingular, "S_Q + C is not SPD");
  try {
    out.Qbar_factor.compute(out.Qbar);
  } catch (const Error& e) {
    throw Error(ErrorCode::QbarSingular, e.what());
  }
  const MatrixX<Scalar> w = out.Qbar_factor.half_solve(to_dense(sys.B));
  MatrixX<Scalar> vbar = s_v;
  vbar.noalias() += w.transpose() * w;
  out.Vbar = Scalar(0.5) * (vbar + vbar.transpose());
  out.Vbar_factor.compute(out.Vbar);
  return out;
}

template <typename Scalar>
Scalar combined_norm(const FittedNorms<Scalar>& norms, const CombinedVector<Scalar>& x) {
  if (x.u.size() != norms.n_v() || x.p.size() != norms.n_q())
    throw Error(ErrorCode::DimensionMismatch, "vector does not match the fitted norms");
  const Scalar sq = x.u.dot(norms.Vbar * x.u) + x.p.dot(norms.Qbar * x.p);
  return std::sqrt(std::max(sq, Scalar(0)));
}

template <typename Scalar>
Scalar v_norm(const FittedNorms<Scalar>& norms, const VectorX<Scalar>& v) {
  return std::sqrt(std::max(v.dot(norms.Vbar * v), Scalar(0)));
}

template <typename Scalar>
Scalar q_norm(const FittedNorms<Scalar>& norms, const VectorX<Scalar>& q) {
  return std::sqrt(std::max(q.dot(norms.Qbar * q), Scalar(0)));
}

template <typename Scalar>
Scalar q_seminorm(const FittedNorms<Scalar>& norms, const VectorX<Scalar>& q) {
  return std::sqrt(std::max(q.dot(norms.S_Q * q), Scalar(0)));
}

}  // namespace saddlecheck
