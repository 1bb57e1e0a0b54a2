#include "oracles.hpp"

#include "contexture/context.hpp"
#include "contexture/error.hpp"
#include "contexture/random.hpp"

#include <doctest.h>

using namespace contexture;

namespace {

PointSet line_points(std::initializer_list<double> xs) {
    PointSet ps;
    ps.points.resize(static_cast<Index>(xs.size()), 1);
    Index i = 0;
    for (double x : xs) ps.points(i++, 0) = x;
    return ps;
}

PointSet random_points(Index n, Index p, Rng& rng) {
    PointSet ps;
    ps.points.resize(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) ps.points(i, j) = rng.normal();
    return ps;
}

double max_row_sum_error(const Matrix& q) { return (q.rowwise().sum().array() - 1.0).abs().maxCoeff(); }

} // namespace

TEST_SUITE("context") {

TEST_CASE("distribution renormalizes and rejects bad weights") {
    DiscreteDistribution d(Vector::Constant(4, 2.0));
    CHECK(d.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d[0] == doctest::Approx(0.25));
    Vector bad(2);
    bad << 1.0, -0.5;
    CHECK_THROWS_AS(DiscreteDistribution{bad}, InvalidArgument);
    CHECK_THROWS_AS(DiscreteDistribution{Vector::Zero(3)}, InvalidArgument);
}

TEST_CASE("knn k=1 on a line") {
    const auto ps = line_points({0.0, 1.0, 10.0});
    const auto ctx = build_knn_context(ps, 1, DiscreteDistribution::uniform(3));
    const Matrix q = oracle::dense_conditional(ctx, 3);
    CHECK(q(0, 1) == 1.0);
    CHECK(q(1, 0) == 1.0);
    CHECK(q(2, 1) == 1.0);
    CHECK(q.sum() == 3.0);
    // nobody picks point 2, so it leaves the context support
    CHECK(ctx.n_context() == 2);
}

TEST_CASE("knn k=2 on three points is uniform over the others") {
    const auto ps = line_points({0.0, 1.0, 3.0});
    const Matrix q = oracle::dense_conditional(build_knn_context(ps, 2, DiscreteDistribution::uniform(3)), 3);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 3; ++j) CHECK(q(i, j) == (i == j ? 0.0 : 0.5));
}

TEST_CASE("knn midpoint of five collinear points") {
    const auto ps = line_points({0, 1, 2, 3, 4});
    const Matrix q = oracle::dense_conditional(build_knn_context(ps, 2, DiscreteDistribution::uniform(5)), 5);
    CHECK(q(2, 1) == 0.5);
    CHECK(q(2, 3) == 0.5);
    CHECK(q.row(2).sum() == doctest::Approx(1.0));
}

TEST_CASE("knn matches full-sort oracle on random points") {
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        const auto ps = random_points(25, 3, rng);
        for (Index k : {1, 3, 7}) CHECK((knn_conditional(ps.points, k) - oracle::knn_matrix(ps.points, k)).norm() == 0.0);
    }
}

TEST_CASE("knn rejects k out of range") {
    const auto ps = line_points({0, 1, 2});
    CHECK_THROWS_AS(build_knn_context(ps, 0, DiscreteDistribution::uniform(3)), InvalidArgument);
    CHECK_THROWS_AS(build_knn_context(ps, 3, DiscreteDistribution::uniform(3)), InvalidArgument);
}

TEST_CASE("rbf two points") {
    const auto ps = line_points({0.0, 1.0});
    const Matrix q = build_rbf_context(ps, 1.0, DiscreteDistribution::uniform(2)).conditional();
    CHECK(q(0, 0) == doctest::Approx(0.7310585786).epsilon(1e-9));
    CHECK(q(0, 1) == doctest::Approx(0.2689414214).epsilon(1e-9));
    CHECK(q(1, 1) == doctest::Approx(q(0, 0)));
}

TEST_CASE("rbf tiny gamma gives uniform rows") {
    const auto ps = line_points({0.0, 1.0, 5.0, -3.0});
    const Matrix q = build_rbf_context(ps, 1e-12, DiscreteDistribution::uniform(4)).conditional();
    CHECK((q.array() - 0.25).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("rbf coincident points split evenly") {
    const auto ps = line_points({2.0, 2.0});
    const Matrix q = build_rbf_context(ps, 3.0, DiscreteDistribution::uniform(2)).conditional();
    CHECK(q(0, 0) == doctest::Approx(0.5));
    CHECK(q(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("rbf matches direct exponentials and survives huge gamma") {
    Rng rng(5);
    const auto ps = random_points(12, 2, rng);
    CHECK((rbf_conditional(ps.points, 0.7) - oracle::rbf_matrix(ps.points, 0.7)).cwiseAbs().maxCoeff() <= 1e-14);
    const Matrix sharp = rbf_conditional(ps.points, 1e6);
    CHECK(sharp.allFinite());
    CHECK(max_row_sum_error(sharp) <= 1e-12);
    CHECK_THROWS_AS(build_rbf_context(ps, -1.0, DiscreteDistribution::uniform(12)), InvalidArgument);
}

TEST_CASE("masked context with no hidden features equals the base builder") {
    Rng rng(2);
    const auto ps = random_points(15, 4, rng);
    const auto marg = DiscreteDistribution::uniform(15);
    BaseBuilder knn{BaseBuilder::Kind::knn, 3, 1.0};
    BaseBuilder rbf{BaseBuilder::Kind::rbf, 1, 0.4};
    const auto mk = build_masked_context(ps, knn, 0.0, 3, 9, marg);
    CHECK((mk.conditional() - build_knn_context(ps, 3, marg).conditional()).norm() == 0.0);
    const auto mr = build_masked_context(ps, rbf, 0.0, 2, 9, marg);
    CHECK((mr.conditional() - build_rbf_context(ps, 0.4, marg).conditional()).norm() <= 1e-15);
}

TEST_CASE("masked context averages the per-mask contexts") {
    Rng rng(4);
    const auto ps = random_points(10, 2, rng);
    const auto marg = DiscreteDistribution::uniform(10);
    BaseBuilder rbf{BaseBuilder::Kind::rbf, 1, 0.8};
    const Matrix keep0 = oracle::rbf_matrix(ps.points.col(0), 0.8);
    const Matrix keep1 = oracle::rbf_matrix(ps.points.col(1), 0.8);
    const Matrix avg = build_masked_context(ps, rbf, 0.5, 2, 3, marg).conditional();
    const double e_mix = (avg - 0.5 * (keep0 + keep1)).cwiseAbs().maxCoeff();
    const double e_0 = (avg - keep0).cwiseAbs().maxCoeff();
    const double e_1 = (avg - keep1).cwiseAbs().maxCoeff();
    CHECK(std::min({e_mix, e_0, e_1}) <= 1e-12);
}

TEST_CASE("masked context rerun is bit exact") {
    Rng rng(8);
    const auto ps = random_points(20, 5, rng);
    const auto marg = DiscreteDistribution::uniform(20);
    BaseBuilder knn{BaseBuilder::Kind::knn, 4, 1.0};
    const Matrix a = build_masked_context(ps, knn, 0.4, 5, 77, marg).conditional();
    const Matrix b = build_masked_context(ps, knn, 0.4, 5, 77, marg).conditional();
    CHECK(a == b);
}

TEST_CASE("label context marginal") {
    const std::vector<int> labels{0, 0, 0, 1};
    const auto ctx = build_label_context(labels, DiscreteDistribution::uniform(4));
    CHECK(ctx.context_marginal()[0] == doctest::Approx(0.75));
    CHECK(ctx.context_marginal()[1] == doctest::Approx(0.25));
    CHECK(ctx.conditional()(3, 1) == 1.0);
}

TEST_CASE("label context errors") {
    const std::vector<int> one_class{0, 0, 0};
    CHECK_THROWS_AS(build_label_context(one_class, DiscreteDistribution::uniform(3)), InvalidArgument);
    const std::vector<int> negative{0, -1, 1};
    CHECK_THROWS_AS(build_label_context(negative, DiscreteDistribution::uniform(3)), InvalidArgument);
}

TEST_CASE("graph context on a triangle, two edges and a path") {
    Matrix tri = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
    const auto t = build_graph_context(tri);
    for (Index i = 0; i < 3; ++i) {
        CHECK(t.input_marginal()[i] == doctest::Approx(1.0 / 3.0));
        for (Index j = 0; j < 3; ++j) CHECK(t.conditional()(i, j) == doctest::Approx(i == j ? 0.0 : 0.5));
    }

    Matrix edges = Matrix::Zero(4, 4);
    edges(0, 1) = edges(1, 0) = 1.0;
    edges(2, 3) = edges(3, 2) = 2.0;
    const Matrix q = build_graph_context(edges).conditional();
    CHECK(q(0, 1) == 1.0);
    CHECK(q(1, 0) == 1.0);
    CHECK(q(2, 3) == 1.0);
    CHECK(q(3, 2) == 1.0);

    Matrix path = Matrix::Zero(3, 3);
    path(0, 1) = path(1, 0) = path(1, 2) = path(2, 1) = 1.0;
    const auto pc = build_graph_context(path);
    CHECK(pc.input_marginal()[0] == doctest::Approx(0.25));
    CHECK(pc.input_marginal()[1] == doctest::Approx(0.5));
    CHECK(pc.input_marginal()[2] == doctest::Approx(0.25));
    CHECK(pc.conditional()(1, 0) == doctest::Approx(0.5));
    CHECK(pc.conditional()(1, 1) == 0.0);
    CHECK(pc.conditional()(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("graph context errors") {
    Matrix asym = Matrix::Ones(3, 3);
    asym(0, 1) = 1.0 + 1e-6;
    CHECK_THROWS_AS(build_graph_context(asym), InvalidArgument);
    Matrix isolated = Matrix::Zero(3, 3);
    isolated(0, 1) = isolated(1, 0) = 1.0;
    CHECK_THROWS_AS(build_graph_context(isolated), InvalidArgument);
    Matrix negative = Matrix::Ones(2, 2);
    negative(0, 1) = negative(1, 0) = -1.0;
    CHECK_THROWS_AS(build_graph_context(negative), InvalidArgument);
}

TEST_CASE("point set validation") {
    PointSet one;
    one.points = Matrix::Zero(1, 2);
    CHECK_THROWS_AS(one.validate(), InvalidArgument);
    PointSet nan = line_points({0.0, std::nan("")});
    CHECK_THROWS_AS(build_knn_context(nan, 1, DiscreteDistribution::uniform(2)), InvalidArgument);
}

TEST_CASE("descriptor round trip") {
    for (const char* text : {"knn:5", "rbf:0.25", "knn+mask:3:0.5:4", "rbf+mask:2:0.25:8", "label"}) {
        const auto d = ContextDescriptor::parse(text);
        CHECK(ContextDescriptor::parse(d.to_string()).to_string() == d.to_string());
    }
    CHECK(ContextDescriptor::parse("knn:5").k == 5);
    CHECK(ContextDescriptor::parse("rbf:0.25").gamma == 0.25);
    CHECK(ContextDescriptor::parse("graph:some/file.csv").path == "some/file.csv");
    CHECK_THROWS_AS(ContextDescriptor::parse("knn"), InvalidArgument);
    CHECK_THROWS_AS(ContextDescriptor::parse("knn:abc"), InvalidArgument);
    CHECK_THROWS_AS(ContextDescriptor::parse("pca:3"), InvalidArgument);
}

TEST_CASE("property: built contexts are row stochastic with consistent marginals") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 5 + static_cast<Index>(rng.index(30));
        const auto ps = random_points(n, 1 + static_cast<Index>(rng.index(4)), rng);
        const DiscreteDistribution marg(oracle::random_marginal(n, rng));
        const Index k = 1 + static_cast<Index>(rng.index(static_cast<std::uint64_t>(n - 1)));
        BaseBuilder base{BaseBuilder::Kind::knn, k, 1.0};
        for (const auto& ctx : {build_knn_context(ps, k, marg), build_rbf_context(ps, rng.uniform(0.01, 5.0), marg),
                                build_masked_context(ps, base, 0.0, 2, 1, marg)}) {
            CHECK(max_row_sum_error(ctx.conditional()) <= 1e-12);
            const Vector pa = ctx.conditional().transpose() * ctx.input_marginal().weights();
            CHECK((pa - ctx.context_marginal().weights()).cwiseAbs().maxCoeff() <= 1e-15);
            CHECK(ctx.context_marginal().weights().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("property: graph contexts satisfy detailed balance") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 3 + static_cast<Index>(rng.index(20));
        Matrix w(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = i; j < n; ++j) w(i, j) = w(j, i) = rng.uniform() < 0.3 ? 0.0 : rng.uniform(0.1, 2.0);
        for (Index i = 0; i < n; ++i) w(i, (i + 1) % n) = w((i + 1) % n, i) = 1.0;
        const auto ctx = build_graph_context(w);
        const Vector& p = ctx.input_marginal().weights();
        const Matrix flow = p.asDiagonal() * ctx.conditional();
        CHECK((flow - flow.transpose()).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(max_row_sum_error(ctx.conditional()) <= 1e-12);
    }
}

} // TEST_SUITE
