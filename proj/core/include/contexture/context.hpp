#ifndef CONTEXTURE_CONTEXT_HPP
#define CONTEXTURE_CONTEXT_HPP

#include "contexture/linalg.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace contexture {

/// Probability vector over a finite support.
///
/// Weights must be finite and non-negative with a positive sum; the
/// constructor renormalizes them to sum to one.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    explicit DiscreteDistribution(Vector weights);

    static DiscreteDistribution uniform(Index n);

    /// Adopts weights that already sum to one within 1e-12, without rescaling.
    /// Keeps derived marginals bit-identical to the product that produced them.
    static DiscreteDistribution from_normalized(Vector weights);

    const Vector& weights() const noexcept { return weights_; }
    Index size() const noexcept { return weights_.size(); }
    double operator[](Index i) const { return weights_(i); }

private:
    Vector weights_;
};

/// Raw dataset rows in standardized feature units.
struct PointSet {
    Matrix points;                 // N x p
    std::optional<Vector> labels;  // optional per-row label or target

    Index size() const noexcept { return points.rows(); }
    Index dimension() const noexcept { return points.cols(); }

    /// Throws InvalidArgument unless N >= 2 and every entry is finite.
    void validate() const;
};

/// Joint distribution P+(x, a) = P_X(x) Q[x, a] over a finite input support
/// X (N points) and context support A (M points).
///
/// Q is row-stochastic. The context marginal is derived from Q and P_X, and
/// context points carrying no mass are removed at construction, so every
/// column of the stored Q has positive marginal mass. `context_ids()` maps the
/// surviving columns back to their original indices; for contexts whose
/// context support is the input support itself (KNN, RBF, graph), those ids
/// are input indices.
class FiniteContext {
public:
    FiniteContext(Matrix conditional, DiscreteDistribution input_marginal, std::string label,
                  bool shares_input_support = false);

    Index n_inputs() const noexcept { return conditional_.rows(); }
    Index n_context() const noexcept { return conditional_.cols(); }
    const Matrix& conditional() const noexcept { return conditional_; }
    const DiscreteDistribution& input_marginal() const noexcept { return input_marginal_; }
    const DiscreteDistribution& context_marginal() const noexcept { return context_marginal_; }
    const std::string& label() const noexcept { return label_; }
    const std::vector<Index>& context_ids() const noexcept { return context_ids_; }

    /// True when A = X: context point j is input point context_ids()[j].
    bool shares_input_support() const noexcept { return shares_input_support_; }

    /// Joint matrix P_X(x) Q[x, a].
    Matrix joint() const;

private:
    Matrix conditional_;
    DiscreteDistribution input_marginal_;
    DiscreteDistribution context_marginal_;
    std::string label_;
    std::vector<Index> context_ids_;
    bool shares_input_support_ = false;
};

/// Each row puts mass 1/k on its k nearest other points (Euclidean). Ties at
/// the k-th distance go to the lower point index. A point is never its own
/// neighbor.
FiniteContext build_knn_context(const PointSet& points, Index k, const DiscreteDistribution& marginal);

/// Q[x, a] proportional to exp(-gamma |x - a|^2), self term included,
/// normalized per row in log space.
FiniteContext build_rbf_context(const PointSet& points, double gamma, const DiscreteDistribution& marginal);

/// Base family for masked contexts.
struct BaseBuilder {
    enum class Kind { knn, rbf };
    Kind kind = Kind::knn;
    Index k = 1;       // knn
    double gamma = 1;  // rbf
};

/// Average of the base context over `n_masks` random feature masks. Each mask
/// hides round(mask_fraction * p) features drawn without replacement; masks
/// are independent of each other and determined by `seed`.
FiniteContext build_masked_context(const PointSet& points, const BaseBuilder& base, double mask_fraction,
                                   Index n_masks, std::uint64_t seed, const DiscreteDistribution& marginal);

/// Deterministic labels 0..c-1 as context: Q[x, a] = 1 iff label(x) = a.
FiniteContext build_label_context(std::span<const int> labels, const DiscreteDistribution& marginal);

/// Random walk on a weighted undirected graph: Q[u, v] = w(u, v) / d(u) with
/// the degree marginal P_X(u) = d(u) / sum_v d(v).
FiniteContext build_graph_context(const Matrix& adjacency);

/// Dense conditional matrices without the FiniteContext wrapper; shared by the
/// masked builder and out-of-support extension.
Matrix knn_conditional(const Matrix& points, Index k);
Matrix rbf_conditional(const Matrix& points, double gamma);

/// Parsed context descriptor string:
///   knn:K  rbf:GAMMA  knn+mask:K:FRAC:NMASKS  rbf+mask:GAMMA:FRAC:NMASKS  label  graph:PATH
struct ContextDescriptor {
    enum class Kind { knn, rbf, knn_mask, rbf_mask, label, graph };
    Kind kind = Kind::knn;
    Index k = 0;
    double gamma = 0.0;
    double mask_fraction = 0.0;
    Index n_masks = 0;
    std::string path;

    static ContextDescriptor parse(const std::string& text);
    std::string to_string() const;
};

/// Builds the context a descriptor names. `labels` feeds `label` contexts;
/// `graph` descriptors read their adjacency matrix from the CSV at `path`.
FiniteContext build_context(const ContextDescriptor& descriptor, const PointSet& points,
                            const DiscreteDistribution& marginal, std::uint64_t seed);

/// Reads a dense adjacency matrix from a headerless numeric CSV.
Matrix read_adjacency_csv(const std::string& path);

} // namespace contexture

#endif // CONTEXTURE_CONTEXT_HPP
