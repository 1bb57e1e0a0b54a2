#include "contexture/context.hpp"

#include "contexture/error.hpp"
#include "contexture/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace contexture {

namespace {

void check_weights(const Vector& w, const char* who) {
    if (w.size() == 0) throw InvalidArgument(std::string(who) + ": empty support");
    for (Index i = 0; i < w.size(); ++i) {
        if (!std::isfinite(w(i)) || w(i) < 0.0)
            throw InvalidArgument(std::string(who) + ": weights must be finite and non-negative");
    }
}

void check_marginal(const DiscreteDistribution& marginal, Index n, const char* who) {
    if (marginal.size() != n)
        throw InvalidArgument(std::string(who) + ": marginal has " + std::to_string(marginal.size()) +
                              " entries for " + std::to_string(n) + " points");
}

double squared_distance(const Matrix& points, Index i, Index j) {
    return (points.row(i) - points.row(j)).squaredNorm();
}

} // namespace

DiscreteDistribution::DiscreteDistribution(Vector weights) {
    check_weights(weights, "DiscreteDistribution");
    const double total = weights.sum();
    if (!(total > 0.0)) throw InvalidArgument("DiscreteDistribution: weights sum to zero");
    weights_ = weights / total;
}

DiscreteDistribution DiscreteDistribution::uniform(Index n) {
    if (n < 1) throw InvalidArgument("DiscreteDistribution::uniform: n must be positive");
    return DiscreteDistribution(Vector::Constant(n, 1.0));
}

DiscreteDistribution DiscreteDistribution::from_normalized(Vector weights) {
    check_weights(weights, "DiscreteDistribution");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw InvalidArgument("DiscreteDistribution::from_normalized: weights do not sum to one");
    DiscreteDistribution out;
    out.weights_ = std::move(weights);
    return out;
}

void PointSet::validate() const {
    if (points.rows() < 2) throw InvalidArgument("PointSet: need at least 2 points");
    if (points.cols() < 1) throw InvalidArgument("PointSet: points have no features");
    if (!points.allFinite()) throw InvalidArgument("PointSet: non-finite feature value");
    if (labels) {
        if (labels->size() != points.rows()) throw InvalidArgument("PointSet: label count mismatch");
        if (!labels->allFinite()) throw InvalidArgument("PointSet: non-finite label");
    }
}

FiniteContext::FiniteContext(Matrix conditional, DiscreteDistribution input_marginal, std::string label,
                             bool shares_input_support)
    : input_marginal_(std::move(input_marginal)), label_(std::move(label)),
      shares_input_support_(shares_input_support) {
    const Index n = conditional.rows();
    const Index m = conditional.cols();
    if (n == 0 || m == 0) throw InvalidArgument("FiniteContext: empty conditional matrix");
    check_marginal(input_marginal_, n, "FiniteContext");
    if (!conditional.allFinite() || (conditional.array() < 0.0).any())
        throw InvalidArgument("FiniteContext: conditional entries must be finite and non-negative");
    for (Index x = 0; x < n; ++x) {
        const double s = conditional.row(x).sum();
        if (std::abs(s - 1.0) > 1e-9)
            throw InvalidArgument("FiniteContext: row " + std::to_string(x) + " sums to " + std::to_string(s));
        if (s != 1.0) conditional.row(x) /= s;
    }

    const Vector q = conditional.transpose() * input_marginal_.weights();
    std::vector<Index> keep;
    for (Index a = 0; a < m; ++a)
        if (q(a) > 0.0) keep.push_back(a);

    if (static_cast<Index>(keep.size()) == m) {
        conditional_ = std::move(conditional);
    } else {
        conditional_.resize(n, static_cast<Index>(keep.size()));
        for (Index j = 0; j < conditional_.cols(); ++j) conditional_.col(j) = conditional.col(keep[j]);
        // Only zero-mass inputs can have weight on dropped columns.
        for (Index x = 0; x < n; ++x) {
            const double s = conditional_.row(x).sum();
            if (!(s > 0.0))
                throw InvalidArgument("FiniteContext: row " + std::to_string(x) +
                                      " has no mass on the supported context points");
            if (s != 1.0) conditional_.row(x) /= s;
        }
    }
    context_ids_ = std::move(keep);
    context_marginal_ =
        DiscreteDistribution::from_normalized(conditional_.transpose() * input_marginal_.weights());
}

Matrix FiniteContext::joint() const { return input_marginal_.weights().asDiagonal() * conditional_; }

Matrix knn_conditional(const Matrix& points, Index k) {
    const Index n = points.rows();
    if (k < 1 || k > n - 1)
        throw InvalidArgument("knn context: k = " + std::to_string(k) + " outside [1, " + std::to_string(n - 1) + "]");
    Matrix q = Matrix::Zero(n, n);
    std::vector<Index> order(static_cast<std::size_t>(n - 1));
    std::vector<double> dist(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) dist[j] = squared_distance(points, i, j);
        std::size_t pos = 0;
        for (Index j = 0; j < n; ++j)
            if (j != i) order[pos++] = j;
        std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](Index a, Index b) {
            return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
        });
        for (Index r = 0; r < k; ++r) q(i, order[r]) = 1.0 / static_cast<double>(k);
    }
    return q;
}

Matrix rbf_conditional(const Matrix& points, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InvalidArgument("rbf context: gamma must be positive");
    const Index n = points.rows();
    Matrix q(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) q(i, j) = -gamma * squared_distance(points, i, j);
        const double top = q.row(i).maxCoeff();
        q.row(i) = (q.row(i).array() - top).exp();
        const double s = q.row(i).sum();
        if (!std::isfinite(s) || !(s > 0.0)) throw NumericalError("rbf context: non-finite kernel row");
        q.row(i) /= s;
    }
    return q;
}

FiniteContext build_knn_context(const PointSet& points, Index k, const DiscreteDistribution& marginal) {
    points.validate();
    check_marginal(marginal, points.size(), "build_knn_context");
    return FiniteContext(knn_conditional(points.points, k), marginal, "knn:" + std::to_string(k), true);
}

FiniteContext build_rbf_context(const PointSet& points, double gamma, const DiscreteDistribution& marginal) {
    points.validate();
    check_marginal(marginal, points.size(), "build_rbf_context");
    ContextDescriptor d;
    d.kind = ContextDescriptor::Kind::rbf;
    d.gamma = gamma;
    return FiniteContext(rbf_conditional(points.points, gamma), marginal, d.to_string(), true);
}

FiniteContext build_masked_context(const PointSet& points, const BaseBuilder& base, double mask_fraction,
                                   Index n_masks, std::uint64_t seed, const DiscreteDistribution& marginal) {
    points.validate();
    check_marginal(marginal, points.size(), "build_masked_context");
    if (!(mask_fraction >= 0.0 && mask_fraction < 1.0))
        throw InvalidArgument("build_masked_context: mask_fraction must lie in [0, 1)");
    if (n_masks < 1) throw InvalidArgument("build_masked_context: n_masks must be at least 1");
    const Index p = points.dimension();
    const auto n_hidden = static_cast<Index>(std::lround(mask_fraction * static_cast<double>(p)));
    if (n_hidden >= p) throw InvalidArgument("build_masked_context: mask hides every feature");

    const Index n = points.size();
    Matrix sum = Matrix::Zero(n, n);
    for (Index m = 0; m < n_masks; ++m) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(m)));
        const auto hidden = rng.sample_without_replacement(static_cast<std::size_t>(p), static_cast<std::size_t>(n_hidden));
        std::vector<bool> masked(static_cast<std::size_t>(p), false);
        for (auto h : hidden) masked[h] = true;
        std::vector<Index> visible;
        for (Index j = 0; j < p; ++j)
            if (!masked[j]) visible.push_back(j);
        const Matrix sub = points.points(Eigen::all, visible);
        sum += base.kind == BaseBuilder::Kind::knn ? knn_conditional(sub, base.k) : rbf_conditional(sub, base.gamma);
    }
    sum /= static_cast<double>(n_masks);

    ContextDescriptor d;
    d.kind = base.kind == BaseBuilder::Kind::knn ? ContextDescriptor::Kind::knn_mask : ContextDescriptor::Kind::rbf_mask;
    d.k = base.k;
    d.gamma = base.gamma;
    d.mask_fraction = mask_fraction;
    d.n_masks = n_masks;
    return FiniteContext(std::move(sum), marginal, d.to_string(), true);
}

FiniteContext build_label_context(std::span<const int> labels, const DiscreteDistribution& marginal) {
    const auto n = static_cast<Index>(labels.size());
    if (n == 0) throw InvalidArgument("build_label_context: no labels");
    check_marginal(marginal, n, "build_label_context");
    const int lo = *std::min_element(labels.begin(), labels.end());
    if (lo < 0) throw InvalidArgument("build_label_context: labels must be non-negative");
    const int c = *std::max_element(labels.begin(), labels.end()) + 1;
    if (c < 2) throw InvalidArgument("build_label_context: need at least 2 classes");
    Matrix q = Matrix::Zero(n, c);
    for (Index x = 0; x < n; ++x) q(x, labels[static_cast<std::size_t>(x)]) = 1.0;
    for (int a = 0; a < c; ++a) {
        double mass = 0.0;
        for (Index x = 0; x < n; ++x) mass += marginal[x] * q(x, a);
        if (!(mass > 0.0)) throw InvalidArgument("build_label_context: class " + std::to_string(a) + " is empty");
    }
    return FiniteContext(std::move(q), marginal, "label", false);
}

FiniteContext build_graph_context(const Matrix& adjacency) {
    const Index n = adjacency.rows();
    if (n < 2 || adjacency.cols() != n) throw InvalidArgument("build_graph_context: adjacency must be square, N >= 2");
    if (!adjacency.allFinite() || (adjacency.array() < 0.0).any())
        throw InvalidArgument("build_graph_context: weights must be finite and non-negative");
    if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidArgument("build_graph_context: adjacency is not symmetric");
    const Vector degree = adjacency.rowwise().sum();
    for (Index u = 0; u < n; ++u)
        if (!(degree(u) > 0.0)) throw InvalidArgument("build_graph_context: node " + std::to_string(u) + " is isolated");
    Matrix q = degree.cwiseInverse().asDiagonal() * adjacency;
    return FiniteContext(std::move(q), DiscreteDistribution(degree), "graph", true);
}

} // namespace contexture
