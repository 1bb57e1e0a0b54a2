#ifndef CONTEXTURE_LINALG_HPP
#define CONTEXTURE_LINALG_HPP

#include <Eigen/Dense>

namespace contexture {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Helpers for the measure-weighted L2 geometry used throughout: functions on
// a finite support are column vectors, and <f, g>_w = sum_i w_i f_i g_i.

/// Column means under weights `w` (which sum to one).
Vector weighted_mean(const Matrix& values, const Vector& w);

/// values - 1 * weighted_mean(values, w)^T.
Matrix weighted_center(const Matrix& values, const Vector& w);

/// A^T diag(w) B.
Matrix weighted_gram(const Matrix& a, const Matrix& b, const Vector& w);

/// Uncentered second-moment matrix A^T diag(w) A, symmetrized.
Matrix weighted_gram(const Matrix& a, const Vector& w);

/// Covariance Cov_w[A] = centered A^T diag(w) centered A.
Matrix weighted_covariance(const Matrix& values, const Vector& w);

/// Orthonormal basis (in L2(w)) of the column span of `values`.
///
/// Directions whose singular value falls below rel_tol * (largest singular
/// value) are dropped, so the result may have fewer columns than the input.
Matrix weighted_orthonormal_basis(const Matrix& values, const Vector& w, double rel_tol = 1e-10);

/// Cosines of the principal angles between two column spans in L2(w),
/// descending. When `center` is set, both spans are centered first.
Vector principal_cosines(const Matrix& a, const Matrix& b, const Vector& w, bool center);

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted descending.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};
SymmetricEigen symmetric_eigen_descending(const Matrix& s);

/// W with W^T C W = I restricted to eigen-directions of the PSD matrix C whose
/// eigenvalue exceeds rel_tol * trace(C). W has one column per kept direction.
Matrix inverse_sqrt_psd(const Matrix& c, double rel_tol = 1e-10);

/// Symmetric part (A + A^T) / 2.
inline Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

} // namespace contexture

#endif // CONTEXTURE_LINALG_HPP
