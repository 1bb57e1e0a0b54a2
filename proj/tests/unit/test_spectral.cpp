#include "oracles.hpp"

#include "contexture/error.hpp"
#include "contexture/spectral.hpp"
#include "contexture/verify.hpp"

#include <doctest.h>

using namespace contexture;

namespace {

FiniteContext independent_context() {
    Matrix q(3, 4);
    Vector row(4);
    row << 0.1, 0.2, 0.3, 0.4;
    for (Index i = 0; i < 3; ++i) q.row(i) = row.transpose();
    Vector p(3);
    p << 0.5, 0.3, 0.2;
    return FiniteContext(q, DiscreteDistribution(p), "independent");
}

double pnorm(const Vector& f, const Vector& w) { return std::sqrt(oracle::weighted_dot(f, f, w)); }

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("independent context") {
    const auto ctx = independent_context();
    const auto op = operator_matrices(ctx);
    for (Index i = 0; i < 3; ++i)
        CHECK((op.forward.row(i).transpose() - ctx.context_marginal().weights()).cwiseAbs().maxCoeff() <= 1e-15);
    for (Index a = 0; a < 4; ++a)
        CHECK((op.adjoint.row(a).transpose() - ctx.input_marginal().weights()).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((dual_kernel(ctx).array() - 1.0).abs().maxCoeff() <= 1e-12);
    const auto spec = contexture_svd(ctx);
    CHECK(spec.singular_values(0) == 1.0);
    CHECK(spec.nontrivial_values().cwiseAbs().maxCoeff() == 0.0);
    for (Index i = 1; i < spec.rank(); ++i) CHECK(spec.clamped[static_cast<std::size_t>(i)]);
}

TEST_CASE("identity context has K_X = 2I") {
    const FiniteContext ctx(Matrix::Identity(2, 2), DiscreteDistribution::uniform(2), "identity");
    CHECK((dual_kernel(ctx) - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("two-state channel") {
    const auto ctx = two_state_channel(0.1);
    Matrix kx(2, 2);
    kx << 1.64, 0.36, 0.36, 1.64;
    CHECK((dual_kernel(ctx) - kx).cwiseAbs().maxCoeff() <= 1e-12);
    const auto op = operator_matrices(ctx);
    CHECK((op.adjoint - ctx.conditional()).cwiseAbs().maxCoeff() <= 1e-15);
    const auto spec = contexture_svd(ctx);
    REQUIRE(spec.rank() == 2);
    CHECK(spec.singular_values(1) == doctest::Approx(0.8).epsilon(1e-12));
    const Vector mu1 = spec.left.col(1);
    const Vector nu1 = spec.right.col(1);
    CHECK(std::abs(mu1(0)) == doctest::Approx(1.0));
    CHECK(mu1(0) == doctest::Approx(-mu1(1)));
    CHECK((apply_operator(op, Direction::forward, nu1) - 0.8 * mu1).cwiseAbs().maxCoeff() <= 1e-12);
    const Vector back = apply_operator(op, Direction::forward, apply_operator(op, Direction::adjoint, mu1));
    CHECK((back - 0.64 * mu1).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("balanced label context has K_A = 2I") {
    Matrix q = Matrix::Zero(4, 2);
    q(0, 0) = q(1, 0) = q(2, 1) = q(3, 1) = 1.0;
    const FiniteContext ctx(q, DiscreteDistribution::uniform(4), "label");
    CHECK((positive_pair_kernel(ctx) - 2.0 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("contexture_svd rank argument") {
    Rng rng(1);
    const auto ctx = random_dense_context(6, 5, rng);
    CHECK(contexture_svd(ctx, 3).rank() == 3);
    CHECK(contexture_svd(ctx).rank() == 5);
    CHECK_THROWS_AS(contexture_svd(ctx, 0), InvalidArgument);
    CHECK_THROWS_AS(contexture_svd(ctx, 6), InvalidArgument);
}

TEST_CASE("truncated reconstruction is the best rank-r joint approximation") {
    Rng rng(21);
    const auto ctx = random_dense_context(8, 7, rng);
    const auto full = contexture_svd(ctx);
    const auto part = contexture_svd(ctx, 3);
    const Vector p = ctx.input_marginal().weights(), q = ctx.context_marginal().weights();
    // whitened residual energy equals the sum of the dropped s_i^2
    const Matrix diff = reconstruct_joint(part) - ctx.joint();
    const Matrix white = p.cwiseSqrt().cwiseInverse().asDiagonal() * diff * q.cwiseSqrt().cwiseInverse().asDiagonal();
    CHECK(white.squaredNorm() == doctest::Approx(full.singular_values.tail(full.rank() - 3).squaredNorm()).epsilon(1e-9));
}

TEST_CASE("property: singular values match an independent whitened SVD") {
    Rng rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.index(25));
        const Index m = 2 + static_cast<Index>(rng.index(25));
        const FiniteContext ctx(oracle::random_conditional(n, m, rng), DiscreteDistribution(oracle::random_marginal(n, rng)), "r");
        const auto spec = contexture_svd(ctx);
        const Vector ref = oracle::singular_values(ctx);
        for (Index i = 0; i < spec.rank(); ++i) {
            const double expect = ref(i) < kClampThreshold ? 0.0 : ref(i);
            CHECK(std::abs(spec.singular_values(i) - expect) <= 1e-10);
        }
    }
}

TEST_CASE("property: adjoint identity, duality, orthonormality, eigen-consistency, trace identity") {
    Rng rng(1234);
    for (int trial = 0; trial < 25; ++trial) {
        const Index n = 3 + static_cast<Index>(rng.index(30));
        const Index m = 3 + static_cast<Index>(rng.index(30));
        const auto ctx = trial % 5 == 4 ? random_graph_context(n, rng) : random_dense_context(n, m, rng);
        const Vector& p = ctx.input_marginal().weights();
        const Vector& q = ctx.context_marginal().weights();
        const auto op = operator_matrices(ctx);
        Vector f(ctx.n_inputs()), g(ctx.n_context());
        for (Index i = 0; i < f.size(); ++i) f(i) = rng.normal();
        for (Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
        CHECK(std::abs(oracle::weighted_dot(f, apply_operator(op, Direction::forward, g), p) -
                       oracle::weighted_dot(apply_operator(op, Direction::adjoint, f), g, q)) <= 1e-10);

        const auto spec = contexture_svd(ctx);
        CHECK(spec.singular_values(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((spec.left.col(0).array() - 1.0).abs().maxCoeff() <= 1e-8);
        CHECK((spec.right.col(0).array() - 1.0).abs().maxCoeff() <= 1e-8);
        CHECK(spec.singular_values.maxCoeff() <= 1.0 + 1e-10);
        const Matrix gl = spec.left.transpose() * p.asDiagonal() * spec.left;
        const Matrix gr = spec.right.transpose() * q.asDiagonal() * spec.right;
        CHECK((gl - Matrix::Identity(gl.rows(), gl.cols())).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK((gr - Matrix::Identity(gr.rows(), gr.cols())).cwiseAbs().maxCoeff() <= 1e-8);

        const Matrix kx = dual_kernel(ctx);
        for (Index i = 0; i < spec.rank(); ++i) {
            const double s = spec.singular_values(i);
            if (s <= kClampThreshold) continue;
            const Vector mu = spec.left.col(i), nu = spec.right.col(i);
            CHECK(pnorm(mu - apply_operator(op, Direction::forward, nu) / s, p) <= 1e-8);
            CHECK(pnorm(nu - apply_operator(op, Direction::adjoint, mu) / s, q) <= 1e-8);
            CHECK((kx * p.asDiagonal() * mu - s * s * mu).norm() <= 1e-8);
        }
        const Vector full = oracle::singular_values(ctx);
        CHECK(full.squaredNorm() == doctest::Approx(kx.diagonal().dot(p)).epsilon(1e-10));
        CHECK((reconstruct_joint(spec) - ctx.joint()).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("property: repeated singular values keep an orthonormal span") {
    Rng rng(5);
    Vector sigma(3);
    sigma << 0.6, 0.6, 0.3;
    const auto pc = planted_context(12, 10, sigma, rng);
    const auto spec = contexture_svd(pc.ctx);
    const Vector cos = oracle::principal_cosines(spec.top_left(2), pc.f.leftCols(2), pc.ctx.input_marginal().weights(), false);
    CHECK(cos.minCoeff() >= 1.0 - 1e-8);
}

} // TEST_SUITE
