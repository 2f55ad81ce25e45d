#pragma once

// Reference computations that share no solver code with the library. They use
// only Eigen's stock decompositions, so agreement with the library is evidence
// rather than tautology.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// All eigenvalues of M1 x = θ M2 x for SPD M2 via M2 = LLᵀ and L⁻¹M1L⁻ᵀ.
inline Vec pencil_eigenvalues(const Mat& m1, const Mat& m2) {
  Eigen::LLT<Mat> llt(m2);
  const Mat l = llt.matrixL();
  const Mat li = l.triangularView<Eigen::Lower>().solve(Mat::Identity(m2.rows(), m2.cols()));
  Mat red = li * m1 * li.transpose();
  red = 0.5 * (red + red.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(red, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// As above in long double, for pencils whose metric is too ill-conditioned
/// for a double-precision reference.
inline Eigen::Matrix<long double, Eigen::Dynamic, 1> pencil_eigenvalues_extended(const Mat& m1, const Mat& m2) {
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  const MatL a = m1.cast<long double>(), b = m2.cast<long double>();
  Eigen::LLT<MatL> llt(b);
  const MatL l = llt.matrixL();
  const MatL li = l.triangularView<Eigen::Lower>().solve(MatL::Identity(b.rows(), b.cols()));
  MatL red = li * a * li.transpose();
  red = 0.5L * (red + red.transpose());
  Eigen::SelfAdjointEigenSolver<MatL> es(red, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Smallest eigenvalue of a symmetric matrix relative to its largest magnitude.
inline double relative_min_eigenvalue(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  return scale == 0 ? 0 : es.eigenvalues()(0) / scale;
}

/// inf over x with M2x ≠ 0 of xᵀM1x / xᵀM2x for PSD M1, PSD M2: the largest θ
/// with M1 − θM2 positive semidefinite, found by bisection on a Jacobi-scaled
/// copy. Handles singular M2 without any range/kernel split.
inline double min_rayleigh_bisection(const Mat& m1, const Mat& m2, double hi, int steps = 200) {
  Vec d(m1.rows());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double s = m1(i, i) + m2(i, i);
    d(i) = s > 0 ? 1.0 / std::sqrt(s) : 1.0;
  }
  const Mat a = d.asDiagonal() * m1 * d.asDiagonal();
  const Mat b = d.asDiagonal() * m2 * d.asDiagonal();
  auto psd = [&](double theta) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a - theta * b, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) >= -1e-13 * std::max(1.0, theta);
  };
  double lo = 0;
  for (int k = 0; k < steps && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (psd(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Classical inf-sup constant inf_q sup_v (Bv)ᵀq / (‖v‖_{MV} ‖q‖_{MQ}) by SVD.
/// The inf runs over the range of M_Q (M_Q may be singular on constants, in
/// which case those directions must be annihilated by Bᵀ).
inline double brezzi_constant_svd(const Mat& b, const Mat& m_v, const Mat& m_q) {
  Eigen::SelfAdjointEigenSolver<Mat> eq(m_q);
  const double top = eq.eigenvalues().maxCoeff();
  std::vector<int> keep;
  for (int i = 0; i < eq.eigenvalues().size(); ++i)
    if (eq.eigenvalues()(i) > 1e-12 * top) keep.push_back(i);
  Mat w(m_q.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k)
    w.col(static_cast<Eigen::Index>(k)) = eq.eigenvectors().col(keep[k]) / std::sqrt(eq.eigenvalues()(keep[k]));
  const Mat lv = Eigen::LLT<Mat>(m_v).matrixL();
  const Mat t = lv.triangularView<Eigen::Lower>().solve(Mat(b.transpose() * w));
  Eigen::JacobiSVD<Mat> svd(t);
  const Vec s = svd.singularValues();
  if (t.cols() > t.rows()) return 0.0;
  return s(s.size() - 1);
}

inline Mat random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> normal;
  Mat m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Vec random_vector(std::mt19937_64& rng, int n) { return random_matrix(rng, n, 1); }

inline Mat random_spd(std::mt19937_64& rng, int n, double shift = 0.5) {
  const Mat g = random_matrix(rng, n, n);
  return g * g.transpose() + shift * n * Mat::Identity(n, n);
}

inline Mat random_symmetric(std::mt19937_64& rng, int n) {
  const Mat g = random_matrix(rng, n, n);
  return 0.5 * (g + g.transpose());
}

}  // namespace oracle
