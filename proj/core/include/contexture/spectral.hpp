#ifndef CONTEXTURE_SPECTRAL_HPP
#define CONTEXTURE_SPECTRAL_HPP

#include "contexture/context.hpp"

#include <vector>

namespace contexture {

/// Expectation operator and its adjoint as dense matrices.
///
/// forward[x, a] = P+(a | x); adjoint[a, x] = P+(x | a). Both are row-stochastic.
struct OperatorMatrices {
    Matrix forward;  // N x M
    Matrix adjoint;  // M x N
};

OperatorMatrices operator_matrices(const FiniteContext& ctx);

enum class Direction { forward, adjoint };

/// forward: x -> sum_a P+(a|x) g(a); adjoint: a -> sum_x P+(x|a) f(x).
/// Accepts a single function or one function per column.
Matrix apply_operator(const OperatorMatrices& op, Direction direction, const Matrix& g);
Vector apply_operator(const OperatorMatrices& op, Direction direction, const Vector& g);

/// K_X = T diag(P_A)^-1 T^T, N x N.
Matrix dual_kernel(const FiniteContext& ctx);

/// K_A = T* diag(P_X)^-1 T*^T, M x M.
Matrix positive_pair_kernel(const FiniteContext& ctx);

/// Singular values and functions of the expectation operator.
///
/// Column 0 is the trivial mode: s_0 = 1 with constant left and right
/// functions, stored exactly. Columns of `left` are orthonormal in
/// L2(P_X), columns of `right` in L2(P_A). Singular values below 1e-10 are
/// set to 0 and marked in `clamped`; their functions are kept but satisfy no
/// duality relation.
struct ContextureSpectrum {
    Vector singular_values;
    Matrix left;   // N x r
    Matrix right;  // M x r
    DiscreteDistribution input_marginal;
    DiscreteDistribution context_marginal;
    std::vector<bool> clamped;

    Index rank() const noexcept { return singular_values.size(); }

    /// s_1, s_2, ... (the trivial s_0 dropped).
    Vector nontrivial_values() const { return singular_values.tail(singular_values.size() - 1); }

    /// Columns 1..d of `left`: the top-d nontrivial left singular functions.
    Matrix top_left(Index d) const;
};

inline constexpr double kClampThreshold = 1e-10;

/// Top `rank` modes of the expectation operator, 1 <= rank <= min(N, M).
///
/// The SVD is taken in whitened coordinates B = diag(P_X)^1/2 T diag(P_A)^-1/2
/// after deflating the known constant mode. Within each mode the entry of
/// largest magnitude of the left function is made positive.
ContextureSpectrum contexture_svd(const FiniteContext& ctx, Index rank);

/// Full-rank spectrum, rank = min(N, M).
ContextureSpectrum contexture_svd(const FiniteContext& ctx);

/// sum_i s_i mu_i(x) nu_i(a) P_X(x) P_A(a). Exact joint at full rank; best
/// rank-r approximation otherwise.
Matrix reconstruct_joint(const ContextureSpectrum& spec);

} // namespace contexture

#endif // CONTEXTURE_SPECTRAL_HPP
