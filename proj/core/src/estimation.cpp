#include "contexture/estimation.hpp"

#include "contexture/error.hpp"
#include "contexture/random.hpp"

#include <algorithm>
#include <cmath>

namespace contexture {

namespace {

// Inverse-CDF sampler over the rows of a row-stochastic matrix.
class RowSampler {
public:
    explicit RowSampler(const Matrix& rows) : cum_(rows.rows(), rows.cols()) {
        for (Index i = 0; i < rows.rows(); ++i) {
            double acc = 0.0;
            for (Index j = 0; j < rows.cols(); ++j) {
                acc += rows(i, j);
                cum_(i, j) = acc;
            }
        }
    }

    Index draw(Index row, Rng& rng) const {
        const Index m = cum_.cols();
        const double u = rng.uniform() * cum_(row, m - 1);
        Index lo = 0, hi = m - 1;
        while (lo < hi) {
            const Index mid = (lo + hi) / 2;
            if (cum_(row, mid) > u) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

private:
    Matrix cum_;  // row-major access pattern is fine at these sizes
};

struct Restriction {
    FiniteContext ctx;
    std::vector<Index> rows;  // full input index of each retained row
};

Restriction restrict_rows(const FiniteContext& ctx, Index m, std::uint64_t seed) {
    const Index n = ctx.n_inputs();
    if (m < 1 || m > n) throw InvalidArgument("subsample_support: m = " + std::to_string(m) + " outside [1, " + std::to_string(n) + "]");
    std::vector<Index> rows;
    if (m == n) {
        for (Index i = 0; i < n; ++i) rows.push_back(i);
        return {ctx, rows};
    }
    Rng rng(seed);
    for (auto i : rng.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(m)))
        rows.push_back(static_cast<Index>(i));
    std::sort(rows.begin(), rows.end());

    const Matrix& q = ctx.conditional();
    Matrix sub;
    if (ctx.shares_input_support()) {
        std::vector<Index> col_of(static_cast<std::size_t>(n), -1);
        for (Index j = 0; j < ctx.n_context(); ++j) col_of[static_cast<std::size_t>(ctx.context_ids()[j])] = j;
        sub = Matrix::Zero(m, m);
        for (Index c = 0; c < m; ++c) {
            const Index col = col_of[static_cast<std::size_t>(rows[c])];
            if (col < 0) continue;
            for (Index r = 0; r < m; ++r) sub(r, c) = q(rows[r], col);
        }
    } else {
        sub = q(rows, Eigen::all);
    }
    for (Index r = 0; r < m; ++r) {
        const double s = sub.row(r).sum();
        if (!(s > 0.0))
            throw InvalidArgument("subsample_support: row " + std::to_string(rows[r]) + " loses all mass after restriction");
        sub.row(r) /= s;
    }
    Vector p = ctx.input_marginal().weights()(rows);
    return {FiniteContext(std::move(sub), DiscreteDistribution(std::move(p)), ctx.label(), ctx.shares_input_support()),
            rows};
}

} // namespace

CovariancePair estimate_covariances(const SampleEncoder& enc, const FiniteContext& ctx, CovarianceMode mode,
                                    Index n_pairs, std::uint64_t seed) {
    if (enc.support() != Support::input || enc.size() != ctx.n_inputs())
        throw InvalidArgument("estimate_covariances: encoder must live on the input support");
    const Vector& p = ctx.input_marginal().weights();
    const Matrix centered = weighted_center(enc.values(), p);
    CovariancePair out;
    out.mode = mode;
    if (mode == CovarianceMode::exact) {
        const Matrix lifted = operator_matrices(ctx).adjoint * centered;
        out.c_phi = weighted_gram(centered, p);
        out.b_phi = weighted_gram(lifted, ctx.context_marginal().weights());
        return out;
    }
    if (n_pairs < 1) throw InvalidArgument("estimate_covariances: pair_sampled mode needs n_pairs >= 1");
    const OperatorMatrices op = operator_matrices(ctx);
    const RowSampler start(Matrix(p.transpose()));
    const RowSampler forward(op.forward);
    const RowSampler backward(op.adjoint);
    Rng rng(seed);
    const Index d = enc.dim();
    Matrix c = Matrix::Zero(d, d);
    Matrix b = Matrix::Zero(d, d);
    for (Index t = 0; t < n_pairs; ++t) {
        const Index x = start.draw(0, rng);
        const Index a = forward.draw(x, rng);
        const Index x2 = backward.draw(a, rng);
        const Vector u = centered.row(x).transpose();
        const Vector v = centered.row(x2).transpose();
        c.noalias() += 0.5 * (u * u.transpose() + v * v.transpose());
        b.noalias() += 0.5 * (u * v.transpose() + v * u.transpose());
    }
    out.c_phi = c / static_cast<double>(n_pairs);
    out.b_phi = b / static_cast<double>(n_pairs);
    out.n_pairs = n_pairs;
    return out;
}

PosthocSpectrum estimate_spectrum_posthoc(const SampleEncoder& enc, const CovariancePair& cov, Index top) {
    const Index d = enc.dim();
    if (cov.c_phi.rows() != d || cov.b_phi.rows() != d) throw InvalidArgument("estimate_spectrum_posthoc: covariance size mismatch");
    if (top < 1 || top > d) throw InvalidArgument("estimate_spectrum_posthoc: top = " + std::to_string(top) + " outside [1, d]");
    const Matrix w = inverse_sqrt_psd(symmetrize(cov.c_phi));
    if (w.cols() < top)
        throw NumericalError("estimate_spectrum_posthoc: C has rank " + std::to_string(w.cols()) + " < top");
    const SymmetricEigen eig = symmetric_eigen_descending(w.transpose() * symmetrize(cov.b_phi) * w);
    Matrix f = enc.centered() * w * eig.vectors.leftCols(top);
    const Vector& p = enc.marginal().weights();
    for (Index j = 0; j < top; ++j) {
        const double var = p.dot(f.col(j).cwiseProduct(f.col(j)));
        if (var > 0.0) f.col(j) /= std::sqrt(var);
    }
    return {eig.values.head(top), SampleEncoder(std::move(f), enc.marginal(), Support::input)};
}

FiniteContext subsample_support(const FiniteContext& ctx, Index m, std::uint64_t seed) {
    return restrict_rows(ctx, m, seed).ctx;
}

ContextureSpectrum estimate_spectrum_subsampled(const FiniteContext& ctx, Index m, Index top, std::uint64_t seed) {
    if (top < 1) throw InvalidArgument("estimate_spectrum_subsampled: top must be at least 1");
    const Restriction r = restrict_rows(ctx, m, seed);
    const FiniteContext& sub = r.ctx;
    const Index sub_rank = std::min(sub.n_inputs(), sub.n_context());

    // Map the subsample's context points to columns of the full context.
    std::vector<Index> full_cols(static_cast<std::size_t>(sub.n_context()));
    if (ctx.shares_input_support()) {
        std::vector<Index> col_of(static_cast<std::size_t>(ctx.n_inputs()), -1);
        for (Index j = 0; j < ctx.n_context(); ++j) col_of[static_cast<std::size_t>(ctx.context_ids()[j])] = j;
        for (Index j = 0; j < sub.n_context(); ++j)
            full_cols[j] = col_of[static_cast<std::size_t>(r.rows[static_cast<std::size_t>(sub.context_ids()[j])])];
    } else {
        for (Index j = 0; j < sub.n_context(); ++j) full_cols[j] = sub.context_ids()[j];
    }

    ContextureSpectrum out;
    out.input_marginal = ctx.input_marginal();
    out.context_marginal = ctx.context_marginal();
    Index k = std::min(top, sub_rank - 1);
    ContextureSpectrum sub_spec;
    if (k > 0) {
        sub_spec = contexture_svd(sub, k + 1);
        while (k > 0 && sub_spec.clamped[static_cast<std::size_t>(k)]) --k;
    }
    if (k == 0) {
        out.singular_values = Vector::Ones(1);
        out.left = Matrix::Ones(ctx.n_inputs(), 1);
        out.right = Matrix::Ones(ctx.n_context(), 1);
        out.clamped = {false};
        return out;
    }

    const Matrix restricted = ctx.conditional()(Eigen::all, full_cols);
    const Vector mass = restricted.rowwise().sum();
    Matrix phi = restricted * sub_spec.right.middleCols(1, k);
    for (Index x = 0; x < phi.rows(); ++x) phi.row(x) = mass(x) > 0.0 ? Vector(phi.row(x).transpose() / mass(x)) : Vector::Zero(k);

    const SampleEncoder enc(std::move(phi), ctx.input_marginal(), Support::input);
    const CovariancePair cov = estimate_covariances(enc, ctx, CovarianceMode::exact);
    const Index kept = std::min(k, inverse_sqrt_psd(cov.c_phi).cols());
    const PosthocSpectrum post = estimate_spectrum_posthoc(enc, cov, kept);

    const Matrix adj = operator_matrices(ctx).adjoint;
    const Vector& q = ctx.context_marginal().weights();
    out.singular_values.resize(kept + 1);
    out.left.resize(ctx.n_inputs(), kept + 1);
    out.right.resize(ctx.n_context(), kept + 1);
    out.clamped.assign(static_cast<std::size_t>(kept + 1), false);
    out.singular_values(0) = 1.0;
    out.left.col(0).setOnes();
    out.right.col(0).setOnes();
    for (Index i = 0; i < kept; ++i) {
        const double s = std::sqrt(std::max(0.0, std::min(1.0, post.eigenvalues(i))));
        out.left.col(i + 1) = post.eigenfunctions.values().col(i);
        Vector nu = adj * post.eigenfunctions.values().col(i);
        const double norm = std::sqrt(q.dot(nu.cwiseProduct(nu)));
        if (s > kClampThreshold && norm > 0.0) {
            out.singular_values(i + 1) = s;
            out.right.col(i + 1) = nu / norm;
        } else {
            out.singular_values(i + 1) = 0.0;
            out.right.col(i + 1).setZero();
            out.clamped[static_cast<std::size_t>(i + 1)] = true;
        }
    }
    return out;
}

} // namespace contexture
