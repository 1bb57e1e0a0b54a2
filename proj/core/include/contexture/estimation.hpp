#ifndef CONTEXTURE_ESTIMATION_HPP
#define CONTEXTURE_ESTIMATION_HPP

#include "contexture/objectives.hpp"
#include "contexture/spectral.hpp"

#include <cstdint>

namespace contexture {

enum class CovarianceMode { exact, pair_sampled };

/// C = Cov_{P_X}[Phi] and B with B[i,j] = <phi~_i, T T* phi~_j>_{P_X}.
struct CovariancePair {
    Matrix c_phi;
    Matrix b_phi;
    CovarianceMode mode = CovarianceMode::exact;
    Index n_pairs = 0;
};

/// exact: C = Phi~^T D_p Phi~, B = (T* Phi~)^T D_q (T* Phi~).
/// pair_sampled: draws chains x ~ P_X, a ~ P+(.|x), x' ~ P+(.|a) and averages
/// C = (phi~ phi~^T + phi~' phi~'^T) / 2 and B = (phi~ phi~'^T + phi~' phi~^T) / 2,
/// which keeps C - B positive semidefinite. Centering uses the exact P_X mean.
CovariancePair estimate_covariances(const SampleEncoder& enc, const FiniteContext& ctx,
                                    CovarianceMode mode = CovarianceMode::exact, Index n_pairs = 0,
                                    std::uint64_t seed = 0);

struct PosthocSpectrum {
    Vector eigenvalues;           // estimates of s_1^2 >= s_2^2 >= ...
    SampleEncoder eigenfunctions; // estimates of mu_1, mu_2, ..., unit variance
};

/// Solves B v = lambda C v by whitening with C^-1/2 (directions of C below
/// 1e-10 * trace dropped) and a symmetric eigendecomposition.
PosthocSpectrum estimate_spectrum_posthoc(const SampleEncoder& enc, const CovariancePair& cov, Index top);

/// Restriction to m seeded-uniform input rows with renormalized marginal; when
/// the context support is the input support it is restricted to the same rows.
/// m = N returns the context unchanged.
FiniteContext subsample_support(const FiniteContext& ctx, Index m, std::uint64_t seed);

/// Spectrum estimate from m subsampled rows: the subsample's top right
/// singular functions are extended to every input by the average encoder of
/// the full context (restricted to the subsample's context points), and the
/// pencil is then solved with exact full-support covariances. Returns up to
/// `top` nontrivial modes after the constant one.
ContextureSpectrum estimate_spectrum_subsampled(const FiniteContext& ctx, Index m, Index top, std::uint64_t seed);

} // namespace contexture

#endif // CONTEXTURE_ESTIMATION_HPP
