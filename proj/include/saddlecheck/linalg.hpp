#pragma once

// Dense/sparse kernels shared by every other module: symmetry checks,
// Jacobi-scaled Cholesky, the generalized symmetric eigensolver used for all
// inf-sup and coercivity constants, and preconditioned MinRes.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "saddlecheck/errors.hpp"

namespace saddlecheck {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using SparseMatrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;
using Sparse = SparseMatrix<double>;

/// Relative tolerance for symmetry and definiteness decisions. One knob,
/// shared by the saddle-point layer.
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kSpdTol = 1e-12;
/// Largest matrix dimension accepted by dense eigensolves.
inline constexpr int kDeskScaleLimit = 4000;

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0) : m.cwiseAbs().maxCoeff();
}

template <typename Scalar>
Scalar max_abs(const SparseMatrix<Scalar>& m) {
  Scalar out(0);
  for (int k = 0; k < m.outerSize(); ++k)
    for (typename SparseMatrix<Scalar>::InnerIterator it(m, k); it; ++it)
      out = std::max(out, std::abs(it.value()));
  return out;
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& m,
                  typename Derived::Scalar rel_tol = kSymmetryTol) {
  if (m.rows() != m.cols()) return false;
  const auto scale = max_abs(m);
  if (scale == 0) return true;
  return max_abs(m - m.transpose()) <= rel_tol * scale;
}

template <typename Scalar>
bool is_symmetric(const SparseMatrix<Scalar>& m, Scalar rel_tol = kSymmetryTol) {
  if (m.rows() != m.cols()) return false;
  const Scalar scale = max_abs(m);
  if (scale == 0) return true;
  SparseMatrix<Scalar> diff = m - SparseMatrix<Scalar>(m.transpose());
  return max_abs(diff) <= rel_tol * scale;
}

template <typename M>
void require_symmetric(const M& m, const std::string& name) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch, name + " is not square");
  if (!is_symmetric(m)) throw Error(ErrorCode::NotSymmetric, name + " fails the symmetry check");
}

template <typename Scalar>
MatrixX<Scalar> to_dense(const SparseMatrix<Scalar>& m) {
  return MatrixX<Scalar>(m);
}

template <typename Scalar>
SparseMatrix<Scalar> to_sparse(const MatrixX<Scalar>& m, Scalar drop = Scalar(0)) {
  return m.sparseView(Scalar(1), drop);
}

/// Inverse square roots of the positive diagonal entries; 1 elsewhere. Used as
/// a congruence scaling so that block-wise parameter scalings do not pollute
/// relative tolerances.
template <typename Derived>
VectorX<typename Derived::Scalar> jacobi_scaling(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  VectorX<Scalar> d(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Scalar v = m(i, i);
    d(i) = v > 0 ? Scalar(1) / std::sqrt(v) : Scalar(1);
  }
  return d;
}

// ---------------------------------------------------------------------------
// Cholesky

/// Cholesky factor of M + shift*I, computed on the Jacobi-scaled matrix
/// D(M + shift I)D = L_s L_sᵀ. The factor of the original matrix is D⁻¹L_s.
template <typename Scalar>
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  CholeskyFactor(const MatrixX<Scalar>& m, Scalar shift = Scalar(0)) { compute(m, shift); }

  void compute(const MatrixX<Scalar>& m, Scalar shift = Scalar(0)) {
    require_symmetric(m, "Cholesky input");
    if (shift < 0) throw Error(ErrorCode::NonSPD, "negative shift");
    MatrixX<Scalar> shifted = m;
    shifted.diagonal().array() += shift;
    for (Eigen::Index i = 0; i < shifted.rows(); ++i)
      if (!(shifted(i, i) > 0))
        throw Error(ErrorCode::NonSPD, "nonpositive diagonal entry at " + std::to_string(i));
    scale_ = jacobi_scaling(shifted);
    MatrixX<Scalar> scaled = scale_.asDiagonal() * shifted * scale_.asDiagonal();
    llt_.compute(scaled);
    if (llt_.info() != Eigen::Success)
      throw Error(ErrorCode::NonSPD, "factorization failed");
    // Scaled diagonal is 1, so the max-diagonal pivot threshold is absolute.
    const auto& l = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
      const Scalar pivot = l(i, i) * l(i, i);
      if (!(pivot > Scalar(1e-14)))
        throw Error(ErrorCode::NonSPD, "pivot below threshold at " + std::to_string(i));
    }
  }

  Eigen::Index size() const { return scale_.size(); }

  /// Lower-triangular L with LLᵀ = M + shift*I.
  MatrixX<Scalar> matrix_l() const {
    MatrixX<Scalar> l = llt_.matrixL();
    return scale_.cwiseInverse().asDiagonal() * l;
  }

  template <typename Rhs>
  MatrixX<Scalar> solve(const Eigen::MatrixBase<Rhs>& b) const {
    MatrixX<Scalar> y = scale_.asDiagonal() * b;
    y = llt_.solve(y);
    return scale_.asDiagonal() * y;
  }

  /// L⁻¹b, so that bᵀ(M + shift I)⁻¹b = ‖L⁻¹b‖².
  template <typename Rhs>
  MatrixX<Scalar> half_solve(const Eigen::MatrixBase<Rhs>& b) const {
    MatrixX<Scalar> y = scale_.asDiagonal() * b;
    llt_.matrixL().solveInPlace(y);
    return y;
  }

  VectorX<Scalar> solve_vector(const VectorX<Scalar>& b) const {
    VectorX<Scalar> y = scale_.cwiseProduct(b);
    y = llt_.solve(y);
    return scale_.cwiseProduct(y);
  }

 private:
  VectorX<Scalar> scale_;
  Eigen::LLT<MatrixX<Scalar>> llt_;
};

template <typename Scalar>
CholeskyFactor<Scalar> cholesky_factor(const MatrixX<Scalar>& m, Scalar shift = Scalar(0)) {
  return CholeskyFactor<Scalar>(m, shift);
}

template <typename Scalar>
CholeskyFactor<Scalar> cholesky_factor(const SparseMatrix<Scalar>& m, Scalar shift = Scalar(0)) {
  return CholeskyFactor<Scalar>(to_dense(m), shift);
}

// ---------------------------------------------------------------------------
// Generalized symmetric eigenproblem M1 x = θ M2 x

enum class EigMode { Full, Extremal };

template <typename Scalar>
struct EigenPencilResult {
  VectorX<Scalar> eigenvalues;   // ascending
  MatrixX<Scalar> eigenvectors;  // columns, M2-orthonormal (empty in extremal mode)
  int kernel_dim = 0;            // dimension of the truncated kernel of M2

  Scalar min() const { return eigenvalues(0); }
  Scalar max() const { return eigenvalues(eigenvalues.size() - 1); }
  Scalar min_abs() const { return eigenvalues.cwiseAbs().minCoeff(); }
  Scalar max_abs() const { return eigenvalues.cwiseAbs().maxCoeff(); }
};

/// Finite eigenvalues of the pencil (M1, M2) with M2 symmetric PSD.
///
/// After a Jacobi congruence, M2 is diagonalized and eigenvalues at or below
/// 1e-12 of its largest are treated as its kernel K. The pencil is then
/// reduced to range(M2) by eliminating K through the Schur complement of M1
/// (pseudo-inverse on K, so common kernel directions drop out). The returned
/// eigenvalues are therefore the infimum/supremum Rayleigh quotients of
/// xᵀM1x / xᵀM2x over all x with M2 x ≠ 0. When M2 is singular, M1 must be
/// PSD; otherwise any symmetric M1 is accepted. Without a kernel the
/// reduction uses the Cholesky factor of the scaled M2 instead.
template <typename Scalar>
EigenPencilResult<Scalar> gen_sym_eig(const MatrixX<Scalar>& m1, const MatrixX<Scalar>& m2,
                                      EigMode mode = EigMode::Full) {
  using Mat = MatrixX<Scalar>;
  using Vec = VectorX<Scalar>;
  if (m1.rows() != m2.rows() || m1.cols() != m2.cols() || m1.rows() != m1.cols())
    throw Error(ErrorCode::DimensionMismatch, "pencil blocks have different shapes");
  const Eigen::Index n = m1.rows();
  if (n > kDeskScaleLimit)
    throw Error(ErrorCode::DeskScaleExceeded,
                "dense pencil of size " + std::to_string(n) + " exceeds desk scale");
  if (n == 0) throw Error(ErrorCode::EmptyRange, "empty pencil");
  require_symmetric(m1, "pencil stiffness");
  require_symmetric(m2, "pencil metric");

  const Vec d = jacobi_scaling(m2);
  const Mat s1 = d.asDiagonal() * m1 * d.asDiagonal();
  const Mat s2 = d.asDiagonal() * m2 * d.asDiagonal();

  Eigen::SelfAdjointEigenSolver<Mat> metric(s2);
  const Vec& lam = metric.eigenvalues();
  const Scalar lam_max = lam(n - 1);
  if (!(lam_max > 0)) throw Error(ErrorCode::EmptyRange, "metric is numerically zero");
  const Scalar cut = Scalar(kSpdTol) * lam_max;
  Eigen::Index k = 0;
  while (k < n && lam(k) <= cut) ++k;
  const Eigen::Index r = n - k;

  EigenPencilResult<Scalar> out;
  out.kernel_dim = static_cast<int>(k);

  if (k == 0) {
    // Definite metric: reduce with its Cholesky factor, which keeps relative
    // accuracy in the small metric eigenvalues where the spectral route does not.
    Eigen::LLT<Mat> llt(s2);
    if (llt.info() == Eigen::Success) {
      const Mat l_inv = llt.matrixL().solve(Mat::Identity(n, n));
      Mat reduced = l_inv * s1 * l_inv.transpose();
      reduced = Scalar(0.5) * (reduced + reduced.transpose()).eval();
      if (mode == EigMode::Extremal) {
        Eigen::SelfAdjointEigenSolver<Mat> es(reduced, Eigen::EigenvaluesOnly);
        out.eigenvalues.resize(2);
        out.eigenvalues << es.eigenvalues()(0), es.eigenvalues()(n - 1);
        return out;
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(reduced);
      out.eigenvalues = es.eigenvalues();
      out.eigenvectors = d.asDiagonal() * (l_inv.transpose() * es.eigenvectors());
      return out;
    }
  }

  const Mat u_range = metric.eigenvectors().rightCols(r);
  const Mat u_kernel = metric.eigenvectors().leftCols(k);
  Mat h_rr = u_range.transpose() * s1 * u_range;
  // Lift from range coordinates to the full (scaled) space.
  Mat lift = u_range;

  if (k > 0) {
    const Mat h_kk = u_kernel.transpose() * s1 * u_kernel;
    const Mat h_kr = u_kernel.transpose() * s1 * u_range;
    Eigen::SelfAdjointEigenSolver<Mat> kk(h_kk);
    const Vec& mu = kk.eigenvalues();
    const Scalar mu_scale = std::max(mu.cwiseAbs().maxCoeff(), max_abs(h_rr));
    Vec mu_inv(k);
    for (Eigen::Index i = 0; i < k; ++i)
      mu_inv(i) = mu(i) > Scalar(kSpdTol) * mu_scale ? Scalar(1) / mu(i) : Scalar(0);
    const Mat z = kk.eigenvectors().transpose() * h_kr;
    const Mat pinv_h_kr = kk.eigenvectors() * (mu_inv.asDiagonal() * z);
    h_rr -= h_kr.transpose() * pinv_h_kr;
    lift -= u_kernel * pinv_h_kr;
  }

  const Vec inv_sqrt = lam.tail(r).cwiseSqrt().cwiseInverse();
  Mat reduced = inv_sqrt.asDiagonal() * h_rr * inv_sqrt.asDiagonal();
  reduced = Scalar(0.5) * (reduced + reduced.transpose()).eval();

  if (mode == EigMode::Extremal) {
    Eigen::SelfAdjointEigenSolver<Mat> es(reduced, Eigen::EigenvaluesOnly);
    out.eigenvalues.resize(2);
    out.eigenvalues << es.eigenvalues()(0), es.eigenvalues()(r - 1);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(reduced);
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = d.asDiagonal() * (lift * (inv_sqrt.asDiagonal() * es.eigenvectors()));
  return out;
}

template <typename Scalar>
EigenPencilResult<Scalar> gen_sym_eig(const SparseMatrix<Scalar>& m1, const SparseMatrix<Scalar>& m2,
                                      EigMode mode = EigMode::Full) {
  return gen_sym_eig<Scalar>(to_dense(m1), to_dense(m2), mode);
}

/// Smallest eigenvalue of a symmetric matrix, Jacobi-scaled first; used for
/// relative PSD/SPD decisions.
template <typename Scalar>
Scalar scaled_min_eigenvalue(const MatrixX<Scalar>& m) {
  const VectorX<Scalar> d = jacobi_scaling(m);
  const MatrixX<Scalar> s = d.asDiagonal() * m * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) / std::max(es.eigenvalues().cwiseAbs().maxCoeff(), Scalar(1e-300));
}

template <typename Scalar>
bool is_spd(const MatrixX<Scalar>& m) {
  return m.rows() > 0 && is_symmetric(m) && scaled_min_eigenvalue(m) > Scalar(kSpdTol);
}

/// PSD up to a relative tolerance of the largest eigenvalue magnitude.
template <typename Scalar>
bool is_psd(const MatrixX<Scalar>& m, Scalar rel_tol = Scalar(1e-10)) {
  if (m.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(m, Eigen::EigenvaluesOnly);
  const Scalar scale = es.eigenvalues().cwiseAbs().maxCoeff();
  return es.eigenvalues()(0) >= -rel_tol * scale;
}

// ---------------------------------------------------------------------------
// MinRes

/// BreakdownDetected, carrying the state MinRes had reached.
class MinresBreakdown : public Error {
 public:
  MinresBreakdown(int iterations, double relative_residual)
      : Error(ErrorCode::BreakdownDetected,
              "Lanczos beta underflow at iteration " + std::to_string(iterations)),
        iterations_(iterations),
        relative_residual_(relative_residual) {}

  int iterations() const { return iterations_; }
  double relative_residual() const { return relative_residual_; }

 private:
  int iterations_;
  double relative_residual_;
};

template <typename Scalar>
using LinearOperator = std::function<VectorX<Scalar>(const VectorX<Scalar>&)>;

template <typename Scalar>
struct MinresResult {
  VectorX<Scalar> solution;
  int iterations = 0;
  bool converged = false;
  Scalar relative_residual = 0;  // ‖r‖_{P⁻¹} / ‖b‖_{P⁻¹}
};

/// Preconditioned MinRes (Paige–Saunders recurrences) for symmetric, possibly
/// indefinite A with SPD preconditioner application P⁻¹. Stops on the
/// preconditioned residual norm.
template <typename Scalar>
MinresResult<Scalar> minres(const LinearOperator<Scalar>& apply_a,
                            const LinearOperator<Scalar>& apply_pinv, const VectorX<Scalar>& rhs,
                            Scalar rel_tol, int max_iter) {
  using Vec = VectorX<Scalar>;
  const Eigen::Index n = rhs.size();
  MinresResult<Scalar> out;
  out.solution = Vec::Zero(n);

  Vec r1 = rhs;
  Vec y = apply_pinv(r1);
  Scalar beta1 = r1.dot(y);
  if (beta1 < 0) throw Error(ErrorCode::NonSPD, "preconditioner is not positive definite");
  beta1 = std::sqrt(beta1);
  if (beta1 == 0) {
    out.converged = true;
    return out;
  }

  Vec r2 = r1;
  Vec w = Vec::Zero(n), w1 = Vec::Zero(n), w2 = Vec::Zero(n);
  Scalar oldb = 0, beta = beta1, dbar = 0, epsln = 0, phibar = beta1;
  Scalar cs = -1, sn = 0;
  const Scalar tiny = std::numeric_limits<Scalar>::epsilon();

  for (int itn = 1; itn <= max_iter; ++itn) {
    const Vec v = y / beta;
    y = apply_a(v);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const Scalar alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = apply_pinv(r2);
    oldb = beta;
    const Scalar bb = r2.dot(y);
    if (bb < 0) throw Error(ErrorCode::NonSPD, "preconditioner is not positive definite");
    beta = std::sqrt(bb);

    const Scalar oldeps = epsln;
    const Scalar delta = cs * dbar + sn * alfa;
    const Scalar gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    Scalar gamma = std::hypot(gbar, beta);
    gamma = std::max(gamma, tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const Scalar phi = cs * phibar;
    phibar = sn * phibar;

    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    out.solution += phi * w;

    out.iterations = itn;
    out.relative_residual = phibar / beta1;
    if (out.relative_residual <= rel_tol) {
      out.converged = true;
      return out;
    }
    if (beta < Scalar(1e-14) * beta1)
      throw MinresBreakdown(itn, static_cast<double>(out.relative_residual));
  }
  return out;
}

}  // namespace saddlecheck
