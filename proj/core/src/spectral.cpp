#include "contexture/spectral.hpp"

#include "contexture/error.hpp"

#include <cmath>

namespace contexture {

namespace {

// Orthonormal basis (Euclidean) for `count` directions orthogonal to the
// orthonormal columns of z.
Matrix orthogonal_complement(const Matrix& z, Index count) {
    const Index n = z.rows();
    const Index k = z.cols();
    if (count <= 0) return Matrix(n, 0);
    Eigen::HouseholderQR<Matrix> qr(z);
    const Matrix selector = Matrix::Identity(n, k + count);
    const Matrix q = qr.householderQ() * selector;
    return q.rightCols(count);
}

} // namespace

OperatorMatrices operator_matrices(const FiniteContext& ctx) {
    const Vector& p = ctx.input_marginal().weights();
    const Vector& q = ctx.context_marginal().weights();
    OperatorMatrices op;
    op.forward = ctx.conditional();
    op.adjoint = q.cwiseInverse().asDiagonal() * ctx.conditional().transpose() * p.asDiagonal();
    return op;
}

Matrix apply_operator(const OperatorMatrices& op, Direction direction, const Matrix& g) {
    const Matrix& m = direction == Direction::forward ? op.forward : op.adjoint;
    if (g.rows() != m.cols())
        throw InvalidArgument("apply_operator: function has " + std::to_string(g.rows()) + " entries, expected " +
                              std::to_string(m.cols()));
    return m * g;
}

Vector apply_operator(const OperatorMatrices& op, Direction direction, const Vector& g) {
    return apply_operator(op, direction, Matrix(g)).col(0);
}

Matrix dual_kernel(const FiniteContext& ctx) {
    const Matrix& t = ctx.conditional();
    const Vector inv_q = ctx.context_marginal().weights().cwiseInverse();
    return symmetrize(t * inv_q.asDiagonal() * t.transpose());
}

Matrix positive_pair_kernel(const FiniteContext& ctx) {
    const Matrix adj = operator_matrices(ctx).adjoint;
    const Vector inv_p = ctx.input_marginal().weights().cwiseInverse();
    return symmetrize(adj * inv_p.asDiagonal() * adj.transpose());
}

Matrix ContextureSpectrum::top_left(Index d) const {
    if (d < 1 || d >= rank())
        throw InvalidArgument("top_left: d = " + std::to_string(d) + " but only " + std::to_string(rank() - 1) +
                              " nontrivial modes");
    return left.middleCols(1, d);
}

ContextureSpectrum contexture_svd(const FiniteContext& ctx, Index rank) {
    const Index n = ctx.n_inputs();
    const Index m = ctx.n_context();
    const Index full = std::min(n, m);
    if (rank < 1 || rank > full)
        throw InvalidArgument("contexture_svd: rank " + std::to_string(rank) + " outside [1, " + std::to_string(full) + "]");

    const Vector& p = ctx.input_marginal().weights();
    const Vector& q = ctx.context_marginal().weights();
    const Vector sp = p.cwiseSqrt();
    const Vector sq = q.cwiseSqrt();

    // B sq = sp and B^T sp = sq, so (sp, sq) is the top singular pair with
    // value 1; remove it and decompose the remainder.
    Matrix deflated = sp.asDiagonal() * ctx.conditional() * sq.cwiseInverse().asDiagonal();
    deflated.noalias() -= sp * sq.transpose();

    Eigen::BDCSVD<Matrix> svd(deflated, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) throw NumericalError("contexture_svd: SVD failed");
    const Vector& sv = svd.singularValues();

    Index good = 0;
    while (good < rank - 1 && good < sv.size() && sv(good) > kClampThreshold) ++good;
    const Index null_count = rank - 1 - good;

    Matrix u(n, rank), v(m, rank);
    u.col(0) = sp;
    v.col(0) = sq;
    u.middleCols(1, good) = svd.matrixU().leftCols(good);
    v.middleCols(1, good) = svd.matrixV().leftCols(good);
    if (null_count > 0) {
        u.rightCols(null_count) = orthogonal_complement(u.leftCols(1 + good), null_count);
        v.rightCols(null_count) = orthogonal_complement(v.leftCols(1 + good), null_count);
    }

    ContextureSpectrum spec;
    spec.singular_values = Vector::Zero(rank);
    spec.singular_values(0) = 1.0;
    spec.singular_values.segment(1, good) = sv.head(good).cwiseMin(1.0);
    spec.clamped.assign(static_cast<std::size_t>(rank), false);
    for (Index i = 1 + good; i < rank; ++i) spec.clamped[static_cast<std::size_t>(i)] = true;

    spec.left = sp.cwiseInverse().asDiagonal() * u;
    spec.right = sq.cwiseInverse().asDiagonal() * v;
    spec.left.col(0).setOnes();
    spec.right.col(0).setOnes();

    for (Index i = 1; i < rank; ++i) {
        Index arg = 0;
        spec.left.col(i).cwiseAbs().maxCoeff(&arg);
        if (spec.left(arg, i) < 0.0) {
            spec.left.col(i) *= -1.0;
            spec.right.col(i) *= -1.0;
        }
    }
    spec.input_marginal = ctx.input_marginal();
    spec.context_marginal = ctx.context_marginal();
    return spec;
}

ContextureSpectrum contexture_svd(const FiniteContext& ctx) {
    return contexture_svd(ctx, std::min(ctx.n_inputs(), ctx.n_context()));
}

Matrix reconstruct_joint(const ContextureSpectrum& spec) {
    const Vector& p = spec.input_marginal.weights();
    const Vector& q = spec.context_marginal.weights();
    return p.asDiagonal() * spec.left * spec.singular_values.asDiagonal() * spec.right.transpose() * q.asDiagonal();
}

} // namespace contexture
