#ifndef CONTEXTURE_EVALUATION_HPP
#define CONTEXTURE_EVALUATION_HPP

#include "contexture/objectives.hpp"
#include "contexture/spectral.hpp"

#include <cstdint>
#include <limits>
#include <vector>

namespace contexture {

/// Target function on the input support.
struct TaskFunction {
    Vector values;
    DiscreteDistribution marginal;

    /// Zero mean, unit variance under `marginal`. Throws NumericalError for a
    /// constant function.
    TaskFunction normalize() const;
};

/// rho = sqrt(sum_{i>=1} s_i^2 u_i^2 / |f~|^2) with u_i = <f~, mu_i>.
/// Mass of f~ outside the spectrum's span counts in the denominator only.
double compatibility(const ContextureSpectrum& spec, const TaskFunction& f);

/// (s_1^2 - (1-eps)^2) / (s_1^2 - s_{d+1}^2) for nontrivial singular values
/// s_1 >= s_2 >= ...; s_{d+1} = 0 past the end. Requires
/// 1 - s_1 <= eps <= 1 - sqrt((s_1^2 + s_2^2) / 2).
double worst_case_err(const Vector& nontrivial_values, Index d, double epsilon);
double worst_case_err(const ContextureSpectrum& spec, Index d, double epsilon);

/// min_{w,b} |w^T Phi + b - f|^2 under the encoder's marginal.
ObjectiveValue approx_err_detailed(const SampleEncoder& enc, const TaskFunction& f);
double approx_err(const SampleEncoder& enc, const TaskFunction& f);

struct ProbeResult {
    Vector weights;
    double bias = 0.0;
    double ridge_penalty = 0.0;
    double train_mse = 0.0;
    double test_mse = 0.0;
};

/// Ridge regression min (1/n) sum (w^T x + b - y)^2 + lambda |w|^2 with the
/// bias unpenalized. The penalty is chosen on the last fifth of the training
/// rows after a seeded shuffle, then the model is refit on all training rows.
ProbeResult fit_linear_probe(const Matrix& train_x, const Vector& train_y, const Matrix& test_x, const Vector& test_y,
                             const std::vector<double>& ridge_grid, std::uint64_t seed = 0);

/// Ridge fit at a fixed penalty on all given rows.
ProbeResult fit_ridge(const Matrix& x, const Vector& y, double penalty);

struct ProbeError {
    Index d = 0;
    double test_mse = 0.0;
};

struct UsefulnessReport {
    Vector tau_curve;  // tau_d for d = 1..d0
    double tau = 0.0;
    Index d_star_metric = 0;
    double decay_rate = std::numeric_limits<double>::quiet_NaN();
    double beta = 1.0;
    Index d0 = 0;
    double kernel_deviation = std::numeric_limits<double>::quiet_NaN();
    double lipschitz = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;  // all nontrivial s_1..s_d0 are zero
    std::vector<ProbeError> probe_errors;
};

/// tau_d = 1/(1 - s_{d+1}^2) + beta (sum_{i<=d} s_i^2) / (sum_{i<=d0} s_i^2),
/// d = 1..d0, over nontrivial singular values sorted descending.
UsefulnessReport usefulness_metric(const Vector& nontrivial_values, Index d0, double beta);

/// lambda minimizing sum_i (s_i^2 - exp(-lambda i))^2 over [0, 50], i = 1, 2, ...
double decay_rate(const Vector& nontrivial_values);

struct AssociationMeasures {
    double deviation = 0.0;
    double lipschitz = 0.0;
};

/// deviation = sum P_X(x) P_X(x') |K[x,x'] - 1|; lipschitz = max over
/// sampled (i < j, k) of |K[k,i] - K[k,j]| / |x_i - x_j|. The sample takes
/// every ceil(N / lipschitz_sample)-th point.
AssociationMeasures kernel_association_measures(const Matrix& kernel, const PointSet& points,
                                                const DiscreteDistribution& marginal, Index lipschitz_sample = 1000);

/// Tr(C^-1 B) over a maximal independent subset of the centered columns,
/// C = Cov_{P_X}[Phi], B = Cov_{P_A}[T* Phi].
double ratio_trace(const SampleEncoder& enc, const FiniteContext& ctx);

struct TraceGapBound {
    double gap_upper = 0.0;
    /// (s_1^2 - (1-eps)^2 + s_1 gap) / (s_1^2 - gap^2); +inf unless valid.
    double err_bound = std::numeric_limits<double>::infinity();
    bool valid = false;  // gap_upper < s_1^2
};

/// gap_upper = s_1^2 + ... + s_{d+1}^2 - ratio_trace(Phi), d = enc.dim().
/// Requires eps > 1 - s_1.
TraceGapBound trace_gap_bound(const SampleEncoder& enc, const FiniteContext& ctx, const ContextureSpectrum& spec,
                              double epsilon);

struct CompatibleLift {
    Vector g;  // on the context support
    double variance_stat = 0.0;
    double bound = 0.0;
    bool holds = false;  // variance_stat <= bound
};

/// g = sum_{i>=1} (u_i / s_i) nu_i, so that T g = f~. Requires a spectrum that
/// spans f~ using only modes with s_i > 1e-8.
CompatibleLift compatible_lift(const ContextureSpectrum& spec, const TaskFunction& f);

/// J = 2 Tr((C - B)^-1 B).
double fisher_discriminant(const SampleEncoder& enc, const FiniteContext& ctx);

/// Mean squared canonical correlation of the centered column spaces.
/// Covariance directions below 1e-10 * trace are discarded.
double cca_alignment(const SampleEncoder& enc1, const SampleEncoder& enc2, const DiscreteDistribution& marginal);

/// Mean over points of the intersection-over-union of k-nearest-neighbor sets
/// after centering and whitening each encoder.
double mutual_knn(const SampleEncoder& enc1, const SampleEncoder& enc2, Index k);

struct CorrelationStats {
    double pearson = 0.0;
    double distance_corr = 0.0;
};

CorrelationStats correlation_stats(const Vector& a, const Vector& b);

} // namespace contexture

#endif // CONTEXTURE_EVALUATION_HPP
