#include "contexture/linalg.hpp"

#include "contexture/error.hpp"

#include <algorithm>
#include <cmath>

namespace contexture {

Vector weighted_mean(const Matrix& values, const Vector& w) {
    if (values.rows() != w.size()) throw InvalidArgument("weighted_mean: weight length mismatch");
    return values.transpose() * w;
}

Matrix weighted_center(const Matrix& values, const Vector& w) {
    const Vector mean = weighted_mean(values, w);
    return values.rowwise() - mean.transpose();
}

Matrix weighted_gram(const Matrix& a, const Matrix& b, const Vector& w) {
    if (a.rows() != w.size() || b.rows() != w.size())
        throw InvalidArgument("weighted_gram: row count mismatch");
    return a.transpose() * w.asDiagonal() * b;
}

Matrix weighted_gram(const Matrix& a, const Vector& w) { return symmetrize(weighted_gram(a, a, w)); }

Matrix weighted_covariance(const Matrix& values, const Vector& w) {
    return weighted_gram(weighted_center(values, w), w);
}

Matrix weighted_orthonormal_basis(const Matrix& values, const Vector& w, double rel_tol) {
    if (values.rows() != w.size()) throw InvalidArgument("weighted_orthonormal_basis: row count mismatch");
    if (values.cols() == 0) return Matrix(values.rows(), 0);
    const Vector sqrt_w = w.cwiseSqrt();
    const Matrix whitened = sqrt_w.asDiagonal() * values;
    Eigen::BDCSVD<Matrix> svd(whitened, Eigen::ComputeThinU);
    const Vector& sv = svd.singularValues();
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    Index rank = 0;
    while (rank < sv.size() && top > 0.0 && sv(rank) > rel_tol * top) ++rank;
    Matrix basis = svd.matrixU().leftCols(rank);
    for (Index i = 0; i < basis.rows(); ++i) {
        // Zero-weight rows carry no L2(w) mass; leave them at zero.
        basis.row(i) = sqrt_w(i) > 0.0 ? Vector(basis.row(i).transpose() / sqrt_w(i)) : Vector::Zero(rank);
    }
    return basis;
}

Vector principal_cosines(const Matrix& a, const Matrix& b, const Vector& w, bool center) {
    const Matrix qa = weighted_orthonormal_basis(center ? weighted_center(a, w) : a, w);
    const Matrix qb = weighted_orthonormal_basis(center ? weighted_center(b, w) : b, w);
    if (qa.cols() == 0 || qb.cols() == 0) return Vector();
    const Matrix cross = weighted_gram(qa, qb, w);
    Eigen::JacobiSVD<Matrix> svd(cross);
    Vector cosines = svd.singularValues();
    for (Index i = 0; i < cosines.size(); ++i) cosines(i) = std::min(1.0, cosines(i));
    return cosines;
}

SymmetricEigen symmetric_eigen_descending(const Matrix& s) {
    if (s.rows() != s.cols()) throw InvalidArgument("symmetric_eigen_descending: matrix not square");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrize(s));
    if (eig.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
    SymmetricEigen out;
    out.values = eig.eigenvalues().reverse();
    out.vectors = eig.eigenvectors().rowwise().reverse();
    return out;
}

Matrix inverse_sqrt_psd(const Matrix& c, double rel_tol) {
    const SymmetricEigen eig = symmetric_eigen_descending(c);
    const double trace = c.trace();
    Index keep = 0;
    while (keep < eig.values.size() && eig.values(keep) > rel_tol * trace && eig.values(keep) > 0.0) ++keep;
    Matrix w = eig.vectors.leftCols(keep);
    for (Index j = 0; j < keep; ++j) w.col(j) /= std::sqrt(eig.values(j));
    return w;
}

} // namespace contexture
