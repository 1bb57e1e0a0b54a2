#ifndef CONTEXTURE_VERIFY_HPP
#define CONTEXTURE_VERIFY_HPP

#include "contexture/context.hpp"
#include "contexture/random.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace contexture {

/// Rows of Q drawn from a flat Dirichlet; P_X Dirichlet(1) shifted away from
/// zero so every input keeps mass.
FiniteContext random_dense_context(Index n, Index m, Rng& rng);

/// Symmetric random-walk context on a dense graph with uniform(0.1, 1) weights.
FiniteContext random_graph_context(Index n, Rng& rng);

/// Binary symmetric channel: uniform inputs, Q = [[1-f, f], [f, 1-f]].
/// s_1 = 1 - 2 f.
FiniteContext two_state_channel(double flip = 0.1);

/// Context with prescribed singular structure:
/// Q[x, a] = q_a (1 + sum_i sigma_i F[x, i] G[a, i]) with uniform P_X and P_A,
/// F and G centered and orthonormal. `sigma` is rescaled when needed so that
/// the perturbation stays within 0.9 in magnitude; the scaled values and the
/// planted functions are returned.
struct PlantedContext {
    FiniteContext ctx;
    Vector sigma;
    Matrix f;  // N x k, the planted left functions
    Matrix g;  // M x k, the planted right functions
};
PlantedContext planted_context(Index n, Index m, const Vector& sigma, Rng& rng);

/// Symmetric variant on a graph: weights 1 + sum_i sigma_i F[u, i] F[v, i],
/// so the transition operator has eigenvalues sigma with eigenfunctions F.
PlantedContext planted_graph_context(Index n, const Vector& sigma, Rng& rng);

/// Matrix with independent standard normal entries.
Matrix random_normal(Index rows, Index cols, Rng& rng);

struct CheckResult {
    std::string name;
    bool passed = true;
    double max_residual = 0.0;
    double tolerance = 0.0;
    Index evaluations = 0;
    std::string detail;
};

struct VerifyReport {
    Index n = 0;
    Index m = 0;
    Index trials = 0;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool all_passed() const;
    Index failures() const;
};

/// Runs every module's invariant checks on `trials` random contexts of size
/// N = n, M = m (plus the two-state channel and planted contexts). Failures
/// are entries of the report, never exceptions. Throws InvalidArgument only
/// for sizes outside [2, 80] or trials < 1.
VerifyReport verify_theorems(Index n, Index m, Index trials, std::uint64_t seed);

} // namespace contexture

#endif // CONTEXTURE_VERIFY_HPP
