#include "contexture/evaluation.hpp"

#include "contexture/error.hpp"
#include "contexture/random.hpp"

#include <algorithm>
#include <cmath>

namespace contexture {

namespace {

const Matrix& adjoint_or_throw(const FiniteContext& ctx, const SampleEncoder& enc, OperatorMatrices& storage) {
    if (enc.support() != Support::input || enc.size() != ctx.n_inputs())
        throw InvalidArgument("encoder must live on the input support of the context");
    storage = operator_matrices(ctx);
    return storage.adjoint;
}

// Indices of the k nearest other rows of z, ties broken by index, sorted.
std::vector<Index> nearest(const Matrix& z, Index i, Index k) {
    const Index n = z.rows();
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) dist[j] = (z.row(i) - z.row(j)).squaredNorm();
    std::vector<Index> order;
    order.reserve(static_cast<std::size_t>(n - 1));
    for (Index j = 0; j < n; ++j)
        if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(),
                      [&](Index a, Index b) { return dist[a] < dist[b] || (dist[a] == dist[b] && a < b); });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

Matrix whiten(const SampleEncoder& enc) {
    const Matrix w = inverse_sqrt_psd(enc.covariance());
    if (w.cols() == 0) throw NumericalError("encoder has zero variance");
    return enc.centered() * w;
}

double decay_loss(const Vector& s2, double lambda) {
    double total = 0.0;
    for (Index i = 0; i < s2.size(); ++i) {
        const double r = s2(i) - std::exp(-lambda * static_cast<double>(i + 1));
        total += r * r;
    }
    return total;
}

} // namespace

TaskFunction TaskFunction::normalize() const {
    if (values.size() != marginal.size()) throw InvalidArgument("TaskFunction: marginal size mismatch");
    const Vector& w = marginal.weights();
    const double mean = w.dot(values);
    const Vector c = values.array() - mean;
    const double var = w.dot(c.cwiseProduct(c));
    if (!(var > 1e-300)) throw NumericalError("TaskFunction: constant target cannot be normalized");
    TaskFunction out{c / std::sqrt(var), marginal};
    // One correction pass keeps the mean within 1e-12 after rounding.
    out.values.array() -= w.dot(out.values);
    return out;
}

double compatibility(const ContextureSpectrum& spec, const TaskFunction& f) {
    const Vector& p = spec.input_marginal.weights();
    if (f.values.size() != p.size()) throw InvalidArgument("compatibility: task size mismatch");
    const Vector ft = f.values.array() - p.dot(f.values);
    const double total = p.dot(ft.cwiseProduct(ft));
    if (!(total > 1e-24)) throw InvalidArgument("compatibility: centered task is identically zero");
    double captured = 0.0;
    for (Index i = 1; i < spec.rank(); ++i) {
        const double u = spec.left.col(i).dot(p.cwiseProduct(ft));
        captured += spec.singular_values(i) * spec.singular_values(i) * u * u;
    }
    return std::min(1.0, std::sqrt(captured / total));
}

double worst_case_err(const Vector& s, Index d, double epsilon) {
    if (s.size() < 1) throw InvalidArgument("worst_case_err: empty spectrum");
    if (d < 1) throw InvalidArgument("worst_case_err: d must be at least 1");
    const double s1 = s(0);
    const double s2 = s.size() > 1 ? s(1) : 0.0;
    const double sd1 = d < s.size() ? s(d) : 0.0;
    const double lo = 1.0 - s1;
    const double hi = 1.0 - std::sqrt(0.5 * (s1 * s1 + s2 * s2));
    if (epsilon < lo - 1e-12)
        throw InvalidArgument("worst_case_err: epsilon " + std::to_string(epsilon) + " below 1 - s_1 = " + std::to_string(lo));
    if (epsilon > hi + 1e-12)
        throw InvalidArgument("worst_case_err: epsilon " + std::to_string(epsilon) +
                              " above 1 - sqrt((s_1^2 + s_2^2)/2) = " + std::to_string(hi));
    const double denom = s1 * s1 - sd1 * sd1;
    if (!(denom > 1e-15)) throw NumericalError("worst_case_err: s_{d+1} = s_1, the worst case is unbounded");
    const double one = 1.0 - epsilon;
    return std::max(0.0, (s1 * s1 - one * one) / denom);
}

double worst_case_err(const ContextureSpectrum& spec, Index d, double epsilon) {
    return worst_case_err(spec.nontrivial_values(), d, epsilon);
}

ObjectiveValue approx_err_detailed(const SampleEncoder& enc, const TaskFunction& f) {
    if (f.values.size() != enc.size()) throw InvalidArgument("approx_err: task size mismatch");
    const LeastSquaresFit fit = weighted_least_squares(enc.values(), Matrix(f.values), enc.marginal().weights(), true);
    return {fit.residual, fit.pseudo_inverse};
}

double approx_err(const SampleEncoder& enc, const TaskFunction& f) { return approx_err_detailed(enc, f).value; }

ProbeResult fit_ridge(const Matrix& x, const Vector& y, double penalty) {
    const Index n = x.rows();
    if (n < 1 || y.size() != n) throw InvalidArgument("fit_ridge: empty or mismatched rows");
    if (!(penalty >= 0.0) || !std::isfinite(penalty)) throw InvalidArgument("fit_ridge: penalty must be non-negative");
    const double inv_n = 1.0 / static_cast<double>(n);
    const Vector xm = x.colwise().mean();
    const double ym = y.mean();
    const Matrix xc = x.rowwise() - xm.transpose();
    const Vector yc = y.array() - ym;
    Matrix g = inv_n * (xc.transpose() * xc);
    g.diagonal().array() += penalty;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(g);
    ProbeResult r;
    r.weights = cod.solve(inv_n * (xc.transpose() * yc));
    r.bias = ym - xm.dot(r.weights);
    r.ridge_penalty = penalty;
    r.train_mse = ((x * r.weights).array() + r.bias - y.array()).square().mean();
    return r;
}

ProbeResult fit_linear_probe(const Matrix& train_x, const Vector& train_y, const Matrix& test_x, const Vector& test_y,
                             const std::vector<double>& ridge_grid, std::uint64_t seed) {
    if (ridge_grid.empty()) throw InvalidArgument("fit_linear_probe: empty ridge grid");
    const Index n = train_x.rows();
    if (n < 2 || train_y.size() != n) throw InvalidArgument("fit_linear_probe: need at least 2 training rows");
    if (test_x.rows() < 1 || test_y.size() != test_x.rows() || test_x.cols() != train_x.cols())
        throw InvalidArgument("fit_linear_probe: empty or mismatched test split");

    double best_penalty = ridge_grid.front();
    if (ridge_grid.size() > 1) {
        const Index n_val = std::max<Index>(1, n / 5);
        Rng rng(seed);
        const auto perm = rng.permutation(static_cast<std::size_t>(n));
        std::vector<Index> fit_rows(perm.begin(), perm.end() - n_val);
        std::vector<Index> val_rows(perm.end() - n_val, perm.end());
        const Matrix fx = train_x(fit_rows, Eigen::all);
        const Vector fy = train_y(fit_rows);
        const Matrix vx = train_x(val_rows, Eigen::all);
        const Vector vy = train_y(val_rows);
        double best = std::numeric_limits<double>::infinity();
        for (double penalty : ridge_grid) {
            const ProbeResult r = fit_ridge(fx, fy, penalty);
            const double mse = ((vx * r.weights).array() + r.bias - vy.array()).square().mean();
            if (mse < best) {
                best = mse;
                best_penalty = penalty;
            }
        }
    }
    ProbeResult out = fit_ridge(train_x, train_y, best_penalty);
    out.test_mse = ((test_x * out.weights).array() + out.bias - test_y.array()).square().mean();
    return out;
}

UsefulnessReport usefulness_metric(const Vector& s, Index d0, double beta) {
    if (d0 < 1) throw InvalidArgument("usefulness_metric: d0 must be at least 1");
    if (!(beta > 0.0)) throw InvalidArgument("usefulness_metric: beta must be positive");
    auto sq = [&](Index i) { return i < s.size() ? s(i) * s(i) : 0.0; };  // i is 0-based: s_{i+1}
    double total = 0.0;
    for (Index i = 0; i < d0; ++i) total += sq(i);
    UsefulnessReport r;
    r.beta = beta;
    r.d0 = d0;
    r.degenerate = !(total > 0.0);
    r.tau_curve.resize(d0);
    double partial = 0.0;
    for (Index d = 1; d <= d0; ++d) {
        partial += sq(d - 1);
        const double next = sq(d);
        const double first = next < 1.0 ? 1.0 / (1.0 - next) : std::numeric_limits<double>::infinity();
        const double ratio = r.degenerate ? 1.0 : partial / total;
        r.tau_curve(d - 1) = first + beta * ratio;
    }
    Index arg = 0;
    for (Index i = 1; i < d0; ++i)
        if (r.tau_curve(i) < r.tau_curve(arg)) arg = i;
    r.tau = r.tau_curve(arg);
    r.d_star_metric = arg + 1;
    return r;
}

double decay_rate(const Vector& s) {
    Index usable = 0;
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > 1e-12) ++usable;
    if (usable < 3) throw InvalidArgument("decay_rate: need at least 3 nontrivial singular values above 1e-12");
    const Vector s2 = s.cwiseProduct(s);
    constexpr double kMax = 50.0;
    constexpr int kGrid = 2000;
    constexpr double h = kMax / kGrid;
    int best = 0;
    double best_loss = decay_loss(s2, 0.0);
    for (int g = 1; g <= kGrid; ++g) {
        const double loss = decay_loss(s2, g * h);
        if (loss < best_loss) {
            best_loss = loss;
            best = g;
        }
    }
    double a = std::max(0.0, (best - 1) * h);
    double b = std::min(kMax, (best + 1) * h);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = decay_loss(s2, c);
    double fd = decay_loss(s2, d);
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = decay_loss(s2, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = decay_loss(s2, d);
        }
    }
    double lambda = 0.5 * (a + b);
    double loss = decay_loss(s2, lambda);
    for (double edge : {0.0, kMax}) {
        const double le = decay_loss(s2, edge);
        if (le < loss) {
            loss = le;
            lambda = edge;
        }
    }
    return lambda;
}

AssociationMeasures kernel_association_measures(const Matrix& kernel, const PointSet& points,
                                                const DiscreteDistribution& marginal, Index lipschitz_sample) {
    const Index n = kernel.rows();
    if (kernel.cols() != n || points.size() != n || marginal.size() != n)
        throw InvalidArgument("kernel_association_measures: size mismatch");
    if (lipschitz_sample < 2) throw InvalidArgument("kernel_association_measures: lipschitz_sample must be at least 2");
    const Vector& p = marginal.weights();
    AssociationMeasures out;
    out.deviation = p.dot((kernel.array() - 1.0).abs().matrix() * p);

    const Index cap = std::min(n, lipschitz_sample);
    const Index stride = (n + cap - 1) / cap;
    std::vector<Index> sample;
    for (Index i = 0; i < n && static_cast<Index>(sample.size()) < cap; i += stride) sample.push_back(i);
    const Matrix ks = kernel(sample, sample);
    const Matrix xs = points.points(sample, Eigen::all);
    bool any_pair = false;
    double best = 0.0;
    const auto m = static_cast<Index>(sample.size());
    for (Index i = 0; i < m; ++i) {
        for (Index j = i + 1; j < m; ++j) {
            const double dist = (xs.row(i) - xs.row(j)).norm();
            if (!(dist > 0.0)) continue;
            any_pair = true;
            const double diff = (ks.col(i) - ks.col(j)).cwiseAbs().maxCoeff();
            best = std::max(best, diff / dist);
        }
    }
    if (!any_pair) throw InvalidArgument("kernel_association_measures: all sampled points coincide");
    out.lipschitz = best;
    return out;
}

double ratio_trace(const SampleEncoder& enc, const FiniteContext& ctx) {
    OperatorMatrices op;
    const Matrix& adj = adjoint_or_throw(ctx, enc, op);
    const Vector& p = ctx.input_marginal().weights();
    const Matrix basis = weighted_orthonormal_basis(weighted_center(enc.values(), p), p);
    if (basis.cols() == 0) throw InvalidArgument("ratio_trace: encoder has zero variance");
    const Matrix lifted = adj * basis;
    return weighted_gram(lifted, ctx.context_marginal().weights()).trace();
}

TraceGapBound trace_gap_bound(const SampleEncoder& enc, const FiniteContext& ctx, const ContextureSpectrum& spec,
                              double epsilon) {
    const Vector s = spec.nontrivial_values();
    if (s.size() < 1) throw InvalidArgument("trace_gap_bound: spectrum has no nontrivial modes");
    const double s1 = s(0);
    if (!(epsilon > 1.0 - s1))
        throw InvalidArgument("trace_gap_bound: epsilon must exceed 1 - s_1 = " + std::to_string(1.0 - s1));
    double partial = 0.0;
    for (Index i = 0; i <= enc.dim() && i < s.size(); ++i) partial += s(i) * s(i);
    TraceGapBound out;
    out.gap_upper = partial - ratio_trace(enc, ctx);
    out.valid = out.gap_upper < s1 * s1;
    if (out.valid) {
        const double one = 1.0 - epsilon;
        out.err_bound = (s1 * s1 - one * one + s1 * out.gap_upper) / (s1 * s1 - out.gap_upper * out.gap_upper);
    }
    return out;
}

CompatibleLift compatible_lift(const ContextureSpectrum& spec, const TaskFunction& f) {
    const Vector& p = spec.input_marginal.weights();
    const Vector& q = spec.context_marginal.weights();
    if (f.values.size() != p.size()) throw InvalidArgument("compatible_lift: task size mismatch");
    const Vector ft = f.values.array() - p.dot(f.values);
    const double norm_f = std::sqrt(p.dot(ft.cwiseProduct(ft)));
    if (!(norm_f > 1e-12)) throw InvalidArgument("compatible_lift: centered task is identically zero");

    Vector residual = ft;
    Vector g = Vector::Zero(spec.right.rows());
    double tg_norm2 = 0.0;
    double captured = 0.0;
    for (Index i = 1; i < spec.rank(); ++i) {
        const double u = spec.left.col(i).dot(p.cwiseProduct(ft));
        residual -= u * spec.left.col(i);
        const double si = spec.singular_values(i);
        if (si > 1e-8) {
            g += (u / si) * spec.right.col(i);
            tg_norm2 += u * u;
            captured += si * si * u * u;
        } else if (std::abs(u) > 1e-8 * norm_f) {
            throw InvalidArgument("compatible_lift: task has mass on a zero singular value; no exact lift exists");
        }
    }
    if (std::sqrt(p.dot(residual.cwiseProduct(residual))) > 1e-8 * std::max(1.0, norm_f))
        throw InvalidArgument("compatible_lift: task is not spanned by the spectrum");

    CompatibleLift out;
    const double g_norm2 = q.dot(g.cwiseProduct(g));
    const double rho = std::min(1.0, std::sqrt(captured) / norm_f);
    out.variance_stat = 2.0 * (g_norm2 - tg_norm2);
    out.bound = 4.0 * (1.0 - rho) * g_norm2;
    out.holds = out.variance_stat <= out.bound + 1e-12;
    out.g = std::move(g);
    return out;
}

double fisher_discriminant(const SampleEncoder& enc, const FiniteContext& ctx) {
    OperatorMatrices op;
    const Matrix& adj = adjoint_or_throw(ctx, enc, op);
    const Vector& p = ctx.input_marginal().weights();
    const Matrix centered = weighted_center(enc.values(), p);
    const Matrix c = weighted_gram(centered, p);
    const Matrix b = weighted_gram(adj * centered, ctx.context_marginal().weights());
    const Matrix within = symmetrize(c - b);
    const SymmetricEigen eig = symmetric_eigen_descending(within);
    const double scale = std::max(c.trace(), std::numeric_limits<double>::min());
    if (!(eig.values(eig.values.size() - 1) > 1e-12 * scale))
        throw NumericalError("fisher_discriminant: C - B is singular");
    return 2.0 * within.ldlt().solve(b).trace();
}

double cca_alignment(const SampleEncoder& enc1, const SampleEncoder& enc2, const DiscreteDistribution& marginal) {
    const Index n = marginal.size();
    if (enc1.size() != n || enc2.size() != n) throw InvalidArgument("cca_alignment: encoders must share the support");
    const Vector& w = marginal.weights();
    const Matrix a = weighted_center(enc1.values(), w);
    const Matrix b = weighted_center(enc2.values(), w);
    const Matrix wa = inverse_sqrt_psd(weighted_gram(a, w));
    const Matrix wb = inverse_sqrt_psd(weighted_gram(b, w));
    if (wa.cols() == 0 || wb.cols() == 0) throw NumericalError("cca_alignment: encoder has zero variance");
    const Matrix cross = weighted_gram(a * wa, b * wb, w);
    Eigen::JacobiSVD<Matrix> svd(cross);
    const Vector rho = svd.singularValues().cwiseMin(1.0);
    return rho.squaredNorm() / static_cast<double>(std::min(wa.cols(), wb.cols()));
}

double mutual_knn(const SampleEncoder& enc1, const SampleEncoder& enc2, Index k) {
    const Index n = enc1.size();
    if (enc2.size() != n) throw InvalidArgument("mutual_knn: encoders must share the support");
    if (k < 1 || k >= n) throw InvalidArgument("mutual_knn: k must lie in [1, N - 1]");
    const Matrix z1 = whiten(enc1);
    const Matrix z2 = whiten(enc2);
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
        const auto a = nearest(z1, i, k);
        const auto b = nearest(z2, i, k);
        std::vector<Index> common;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
        const auto inter = static_cast<double>(common.size());
        total += inter / (2.0 * static_cast<double>(k) - inter);
    }
    return total / static_cast<double>(n);
}

CorrelationStats correlation_stats(const Vector& a, const Vector& b) {
    const Index n = a.size();
    if (b.size() != n || n < 3) throw InvalidArgument("correlation_stats: need equal lengths of at least 3");
    const Vector ac = a.array() - a.mean();
    const Vector bc = b.array() - b.mean();
    const double va = ac.squaredNorm();
    const double vb = bc.squaredNorm();
    if (!(va > 0.0) || !(vb > 0.0)) throw NumericalError("correlation_stats: zero variance, Pearson undefined");
    CorrelationStats out;
    out.pearson = std::clamp(ac.dot(bc) / std::sqrt(va * vb), -1.0, 1.0);

    auto centered_distances = [n](const Vector& v) {
        Matrix d(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) d(i, j) = std::abs(v(i) - v(j));
        const Vector row = d.rowwise().mean();
        const Vector col = d.colwise().mean().transpose();
        const double all = d.mean();
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) d(i, j) += all - row(i) - col(j);
        return d;
    };
    const Matrix da = centered_distances(a);
    const Matrix db = centered_distances(b);
    const double dcov = std::max(0.0, (da.array() * db.array()).mean());
    const double dva = (da.array() * da.array()).mean();
    const double dvb = (db.array() * db.array()).mean();
    const double denom = std::sqrt(dva * dvb);
    out.distance_corr = denom > 0.0 ? std::min(1.0, std::sqrt(dcov / denom)) : 0.0;
    return out;
}

} // namespace contexture
