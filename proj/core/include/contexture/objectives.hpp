#ifndef CONTEXTURE_OBJECTIVES_HPP
#define CONTEXTURE_OBJECTIVES_HPP

#include "contexture/context.hpp"
#include "contexture/spectral.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace contexture {

enum class Support { input, context };

/// Encoder realized by its values on a finite support, one column per output
/// dimension. Mean and covariance under the support marginal are computed
/// once at construction.
class SampleEncoder {
public:
    SampleEncoder() = default;
    SampleEncoder(Matrix values, DiscreteDistribution marginal, Support support = Support::input);

    const Matrix& values() const noexcept { return values_; }
    const DiscreteDistribution& marginal() const noexcept { return marginal_; }
    Support support() const noexcept { return support_; }
    Index size() const noexcept { return values_.rows(); }
    Index dim() const noexcept { return values_.cols(); }

    const Vector& mean() const noexcept { return mean_; }
    const Matrix& covariance() const noexcept { return covariance_; }
    Matrix centered() const;

private:
    Matrix values_;
    DiscreteDistribution marginal_;
    Support support_ = Support::input;
    Vector mean_;
    Matrix covariance_;
};

/// Top-d nontrivial left singular functions as an input-support encoder.
SampleEncoder top_encoder(const ContextureSpectrum& spec, Index d);

enum class LossKernelKind { indicator, linear, centered_linear };

/// Loss kernel evaluated on the rows of `context_vectors`.
///
/// indicator: 1 where two rows are identical, else 0 (rows are treated as
/// discrete labels). linear: C C^T. centered_linear: the same after
/// subtracting the `marginal`-weighted mean row.
Matrix loss_kernel_matrix(LossKernelKind kind, const Matrix& context_vectors, const DiscreteDistribution& marginal);

enum class ObjectiveKind {
    supervised_unbiased,
    supervised_balanced,
    regression_biased,
    regression_unbiased,
    multiview_contrastive,
    multiview_noncontrastive,
    reconstruction_biased,
    reconstruction_unbiased,
    node_embedding,
};

inline constexpr ObjectiveKind kAllObjectives[] = {
    ObjectiveKind::supervised_unbiased,      ObjectiveKind::supervised_balanced,
    ObjectiveKind::regression_biased,        ObjectiveKind::regression_unbiased,
    ObjectiveKind::multiview_contrastive,    ObjectiveKind::multiview_noncontrastive,
    ObjectiveKind::reconstruction_biased,    ObjectiveKind::reconstruction_unbiased,
    ObjectiveKind::node_embedding,
};

std::string to_string(ObjectiveKind kind);
ObjectiveKind parse_objective(const std::string& name);

/// Support the objective's encoder lives on.
Support objective_support(ObjectiveKind kind);

/// True when the minimizer is characterized up to an additive constant, so
/// spans should be compared after centering.
bool objective_is_centered(ObjectiveKind kind);

/// Auxiliary coordinates for least-squares objectives.
///
/// regression_*: one row per context point (M x q); defaults to one-hot
/// context indices. reconstruction_*: one row per input point (N x q);
/// defaults to one-hot input indices. Other objectives ignore it.
using AuxVectors = std::optional<Matrix>;

struct SpectralSolution {
    SampleEncoder encoder;
    /// Least-squares objectives: eigenvalues of the loss-kernel operator.
    /// Multi-view: singular values s_1..s_d. Node: eigenvalues of the
    /// symmetrized transition operator (their magnitudes are singular values).
    Vector eigenvalues;
};

/// Closed-form minimizer.
///
/// Least-squares objectives return the top-d eigenfunctions of the loss-kernel
/// operator: T Lambda T* on L2(P_X) for supervised and regression, T* Lambda T
/// on L2(P_A) for reconstruction. The constant function is excluded for the
/// biased variants. supervised_balanced uses its exact importance-weighted
/// least-squares form. Multi-view objectives return the context-support
/// minimizer Psi (nu_i for L_N, s_i nu_i for L_C); map it to the input
/// support with average_encoder. node_embedding requires A = X.
SpectralSolution solve_spectral(ObjectiveKind objective, const FiniteContext& ctx, Index d,
                                const AuxVectors& aux = std::nullopt);

enum class ConstraintMode { whiten, penalty };

struct VariationalOptions {
    Index steps = 5000;
    double learning_rate = 0.05;
    std::uint64_t seed = 0;
    ConstraintMode constraint_mode = ConstraintMode::whiten;
    double penalty_weight = 10.0;
    double gradient_tolerance = 1e-10;
};

struct VariationalSolution {
    SampleEncoder encoder;
    std::vector<double> trace;  // objective value after every accepted step
    Index iterations = 0;
    bool converged = false;
};

/// Full-batch gradient descent on the value matrix.
///
/// Steps follow the L2(marginal) gradient. A step that fails to decrease the
/// objective is rejected and the step size halved; an accepted step grows it
/// by 1.5. Least-squares heads are solved exactly at every iterate. With
/// ConstraintMode::whiten the constrained objectives (L_N, node) and the
/// mixing-invariant least-squares objectives are re-whitened after every step;
/// with ConstraintMode::penalty the constraint enters as
/// penalty_weight * |Cov - I|_F^2 and a single whitening is applied at the
/// end. Throws DivergenceError after 100 consecutive rejected steps unless
/// the gradient is already negligible.
VariationalSolution solve_variational(ObjectiveKind objective, const FiniteContext& ctx, Index d,
                                      const VariationalOptions& opts = {}, const AuxVectors& aux = std::nullopt);

/// Phi = T Psi.
SampleEncoder average_encoder(const FiniteContext& ctx, const SampleEncoder& psi);

struct ObjectiveValue {
    double value = 0.0;
    bool pseudo_inverse = false;  // least-squares head was rank deficient
};

/// Exact population objective. Throws ConstraintViolation when L_N or node
/// encoders are not whitened (|Cov - I| > 1e-6).
ObjectiveValue eval_objective_detailed(ObjectiveKind objective, const FiniteContext& ctx, const SampleEncoder& enc,
                                       const AuxVectors& aux = std::nullopt);

double eval_objective(ObjectiveKind objective, const FiniteContext& ctx, const SampleEncoder& enc,
                      const AuxVectors& aux = std::nullopt);

/// Minimum of weighted least squares sum_x w_x |W phi(x) + b - y(x)|^2 over
/// (W, b), with b fixed at 0 when `bias` is false.
struct LeastSquaresFit {
    Matrix coefficients;  // d x q
    Vector intercept;     // q
    double residual = 0.0;
    bool pseudo_inverse = false;
};
LeastSquaresFit weighted_least_squares(const Matrix& design, const Matrix& targets, const Vector& weights, bool bias);

} // namespace contexture

#endif // CONTEXTURE_OBJECTIVES_HPP
