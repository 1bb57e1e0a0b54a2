#include "contexture/verify.hpp"

#include "contexture/error.hpp"
#include "contexture/estimation.hpp"
#include "contexture/evaluation.hpp"
#include "contexture/objectives.hpp"
#include "contexture/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace contexture {

namespace {

Vector dirichlet(Index n, Rng& rng) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        v(i) = -std::log(u);
    }
    return v / v.sum();
}

double wnorm(const Vector& f, const Vector& w) { return std::sqrt(w.dot(f.cwiseProduct(f))); }

Matrix whiten_centered(const Matrix& v, const Vector& w) {
    const Matrix c = weighted_center(v, w);
    return c * inverse_sqrt_psd(weighted_gram(c, w));
}

Matrix random_mixer(Index d, Rng& rng) {
    Matrix a = random_normal(d, d, rng);
    a.diagonal().array() += 3.0;  // keeps the mixer well conditioned
    return a;
}

// Centered L2(p) orthonormal completion of the nontrivial left functions;
// the added directions carry singular value 0.
void full_left_basis(const ContextureSpectrum& spec, Rng& rng, Matrix& basis, Vector& s2) {
    const Vector& p = spec.input_marginal.weights();
    const Index n = spec.left.rows();
    const Matrix u = spec.left.rightCols(spec.rank() - 1);
    Matrix known(n, spec.rank());
    known << Vector::Ones(n), u;
    Matrix extra = random_normal(n, n, rng);
    for (int pass = 0; pass < 2; ++pass) extra -= known * (known.transpose() * p.asDiagonal() * extra);
    const Matrix r = weighted_orthonormal_basis(extra, p, 1e-8);
    const Index k = std::min<Index>(r.cols(), n - spec.rank());
    basis.resize(n, u.cols() + k);
    basis << u, r.leftCols(k);
    s2 = Vector::Zero(basis.cols());
    s2.head(u.cols()) = spec.nontrivial_values().array().square();
}

// max { c^T A c : |c| = 1, c^T diag(s2) c >= (1 - eps)^2 } through its
// Lagrangian dual min_{t >= 0} lambda_max(A + t (diag(s2) - (1 - eps)^2 I)),
// which is exact when the dimension is at least 3.
double constrained_quadratic_max(const Matrix& a, const Vector& s2, double eps) {
    const Index k = a.rows();
    Matrix m = Matrix::Zero(k, k);
    m.diagonal() = s2.array() - (1.0 - eps) * (1.0 - eps);
    auto f = [&](double t) {
        return Eigen::SelfAdjointEigenSolver<Matrix>(symmetrize(a + t * m), Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    };
    double lo = 0.0, hi = 1.0;
    while (hi < 1e8 && f(2.0 * hi) < f(hi)) hi *= 2.0;
    hi *= 2.0;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200; ++it) {
        if (f1 <= f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - g * (hi - lo); f1 = f(x1);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + g * (hi - lo); f2 = f(x2);
        }
    }
    return std::min({f(0.0), f1, f2, f(lo), f(hi)});
}

// Worst-case approximation error of an encoder over compatible tasks spanned
// by `basis` (centered, orthonormal), with per-direction squared singular value s2.
double worst_case_over_span(const Matrix& phi, const Vector& p, const Matrix& basis, const Vector& s2, double eps) {
    const Matrix b = weighted_orthonormal_basis(weighted_center(phi, p), p);
    const Matrix c = b.transpose() * p.asDiagonal() * basis;
    const Matrix a = Matrix::Identity(basis.cols(), basis.cols()) - c.transpose() * c;
    return constrained_quadratic_max(a, s2, eps);
}

// Brute-force maximum of approx_err(top-d, f) over f = cos t mu_1 + sin t mu_{d+1}
// with rho(f) >= 1 - eps: a dense grid refined by bisection at the boundary.
double two_mode_worst(const ContextureSpectrum& spec, Index d, double eps) {
    const SampleEncoder enc = top_encoder(spec, d);
    const Vector mu1 = spec.left.col(1);
    const Vector mud = spec.left.col(d + 1);
    auto task = [&](double t) { return TaskFunction{std::cos(t) * mu1 + std::sin(t) * mud, spec.input_marginal}; };
    auto feasible = [&](double t) { return compatibility(spec, task(t)) >= 1.0 - eps; };
    constexpr int kGrid = 2000;
    const double h = std::numbers::pi / 2.0 / kGrid;
    double best = 0.0;
    for (int i = 0; i <= kGrid; ++i) {
        const double t = i * h;
        if (!feasible(t)) continue;
        best = std::max(best, approx_err(enc, task(t)));
        if (i < kGrid && !feasible(t + h)) {
            double lo = t, hi = t + h;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mid) ? lo : hi) = mid;
            }
            best = std::max(best, approx_err(enc, task(lo)));
        }
    }
    return best;
}

// epsilon at the midpoint of the admissible range for the worst-case formula.
double mid_epsilon(const Vector& s) {
    const double lo = 1.0 - s(0);
    const double hi = 1.0 - std::sqrt((s(0) * s(0) + s(1) * s(1)) / 2.0);
    return 0.5 * (lo + hi);
}

class Suite {
public:
    Index add(const std::string& name, double tolerance) {
        CheckResult r;
        r.name = name;
        r.tolerance = tolerance;
        checks_.push_back(r);
        return static_cast<Index>(checks_.size() - 1);
    }

    void record(Index id, double residual) {
        CheckResult& r = checks_[static_cast<std::size_t>(id)];
        ++r.evaluations;
        if (std::isnan(residual)) {
            r.passed = false;
            r.max_residual = std::numeric_limits<double>::infinity();
            note(id, "non-finite residual");
            return;
        }
        r.max_residual = std::max(r.max_residual, residual);
        if (!(residual <= r.tolerance)) r.passed = false;
    }

    void fail(Index id, const std::string& why) {
        CheckResult& r = checks_[static_cast<std::size_t>(id)];
        r.passed = false;
        note(id, why);
    }

    void note(Index id, const std::string& text) {
        CheckResult& r = checks_[static_cast<std::size_t>(id)];
        if (r.detail.empty()) r.detail = text;
    }

    // Runs `body`, turning any exception into a failure of check `id`.
    void guard(Index id, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            fail(id, e.what());
        }
    }

    std::vector<CheckResult> take() { return std::move(checks_); }

private:
    std::vector<CheckResult> checks_;
};

} // namespace

Matrix random_normal(Index rows, Index cols, Rng& rng) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

FiniteContext random_dense_context(Index n, Index m, Rng& rng) {
    Matrix q(n, m);
    for (Index i = 0; i < n; ++i) q.row(i) = dirichlet(m, rng).transpose();
    Vector p = dirichlet(n, rng).array() + 0.5 / static_cast<double>(n);
    return FiniteContext(std::move(q), DiscreteDistribution(std::move(p)), "random");
}

FiniteContext random_graph_context(Index n, Rng& rng) {
    Matrix w(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) w(i, j) = w(j, i) = rng.uniform(0.1, 1.0);
    return build_graph_context(w);
}

FiniteContext two_state_channel(double flip) {
    if (!(flip >= 0.0 && flip <= 1.0)) throw InvalidArgument("two_state_channel: flip outside [0, 1]");
    Matrix q(2, 2);
    q << 1.0 - flip, flip, flip, 1.0 - flip;
    return FiniteContext(std::move(q), DiscreteDistribution::uniform(2), "two_state_channel");
}

PlantedContext planted_context(Index n, Index m, const Vector& sigma, Rng& rng) {
    const Index k = sigma.size();
    if (k < 1 || k >= std::min(n, m)) throw InvalidArgument("planted_context: need 1 <= k < min(N, M)");
    for (Index i = 0; i < k; ++i)
        if (!(sigma(i) > 0.0)) throw InvalidArgument("planted_context: sigma must be positive");
    const Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const Vector q = Vector::Constant(m, 1.0 / static_cast<double>(m));
    const Matrix f = weighted_orthonormal_basis(weighted_center(random_normal(n, k, rng), p), p);
    const Matrix g = weighted_orthonormal_basis(weighted_center(random_normal(m, k, rng), q), q);
    Vector s = sigma;
    const Matrix pert = f * s.asDiagonal() * g.transpose();
    const double peak = pert.cwiseAbs().maxCoeff();
    if (peak > 0.9) s *= 0.9 / peak;
    Matrix cond = (Matrix::Ones(n, m) + f * s.asDiagonal() * g.transpose()) / static_cast<double>(m);
    FiniteContext ctx(std::move(cond), DiscreteDistribution::uniform(n), "planted");
    return {std::move(ctx), s, f, g};
}

PlantedContext planted_graph_context(Index n, const Vector& sigma, Rng& rng) {
    const Index k = sigma.size();
    if (k < 1 || k >= n) throw InvalidArgument("planted_graph_context: need 1 <= k < N");
    const Vector p = Vector::Constant(n, 1.0 / static_cast<double>(n));
    const Matrix f = weighted_orthonormal_basis(weighted_center(random_normal(n, k, rng), p), p);
    Vector s = sigma;
    const double peak = (f * s.asDiagonal() * f.transpose()).cwiseAbs().maxCoeff();
    if (peak > 0.9) s *= 0.9 / peak;
    const Matrix w = Matrix::Ones(n, n) + f * s.asDiagonal() * f.transpose();
    return {build_graph_context(symmetrize(w)), s, f, f};
}

bool VerifyReport::all_passed() const { return failures() == 0; }

Index VerifyReport::failures() const {
    return static_cast<Index>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

VerifyReport verify_theorems(Index n, Index m, Index trials, std::uint64_t seed) {
    if (n < 3 || n > 80 || m < 3 || m > 80) throw InvalidArgument("verify_theorems: n and m must lie in [3, 80]");
    if (trials < 1) throw InvalidArgument("verify_theorems: trials must be at least 1");

    Suite suite;
    // context
    const auto c_rows = suite.add("context.row_stochastic", 1e-12);
    const auto c_marg = suite.add("context.marginal_consistency", 0.0);
    const auto c_balance = suite.add("context.graph_detailed_balance", 1e-15);
    // spectral
    const auto s_dual = suite.add("spectral.duality", 1e-8);
    const auto s_orth = suite.add("spectral.orthonormality", 1e-9);
    const auto s_eig = suite.add("spectral.dual_kernel_eigen", 1e-8);
    const auto s_jensen = suite.add("spectral.jensen_bound", 1e-10);
    const auto s_trace = suite.add("spectral.trace_identity", 1e-8);
    const auto s_joint = suite.add("spectral.joint_reconstruction", 1e-8);
    const auto s_channel = suite.add("spectral.two_state_channel", 1e-12);
    const auto s_planted = suite.add("spectral.planted_degenerate_span", 1e-8);
    // objectives
    const auto o_min = suite.add("objectives.spectral_minimality", 1e-9);
    const auto o_closed = suite.add("objectives.closed_form_optimum", 1e-8);
    const auto o_linear = suite.add("objectives.average_encoder_linearity", 1e-12);
    const auto o_collapse = suite.add("objectives.balanced_class_collapse", 1e-8);
    const auto o_var_span = suite.add("objectives.variational_span_agreement", 0.01);
    const auto o_var_value = suite.add("objectives.variational_value_agreement", 1e-3);
    // evaluation
    const auto e_rho = suite.add("evaluation.compatibility_direct_max", 1e-6);
    const auto e_two = suite.add("evaluation.worst_case_two_mode", 1e-4);
    const auto e_lower = suite.add("evaluation.worst_case_lower_bound", 1e-6);
    const auto e_pad = suite.add("evaluation.tau_zero_padding", 0.0);
    const auto e_rt_mix = suite.add("evaluation.ratio_trace_mixing", 1e-8);
    const auto e_rt_bound = suite.add("evaluation.ratio_trace_bound", 1e-9);
    const auto e_mono = suite.add("evaluation.approx_err_monotone", 1e-12);
    const auto e_cca = suite.add("evaluation.cca_mixing_invariance", 1e-8);
    const auto e_knn = suite.add("evaluation.mutual_knn_identity", 0.0);
    const auto e_lift = suite.add("evaluation.lift_reconstruction", 1e-8);
    const auto e_lift_bound = suite.add("evaluation.lift_single_mode_bound", 0.0);
    const auto e_weak = suite.add("evaluation.weak_association", 0.0);
    const auto e_gap = suite.add("evaluation.trace_gap_bound", 1e-9);
    const auto e_fisher = suite.add("evaluation.fisher_closed_form", 1e-8);
    const auto e_decay = suite.add("evaluation.decay_rate_exponential", 1e-6);
    const auto e_indep = suite.add("evaluation.tau_independent_context", 0.0);
    // estimation
    const auto x_mix = suite.add("estimation.posthoc_mixing_invariance", 1e-8);
    const auto x_upper = suite.add("estimation.eigenvalue_upper_bound", 1e-8);
    const auto x_pairs = suite.add("estimation.pair_sampled_channel", 0.01);
    const auto x_full = suite.add("estimation.subsample_full_support", 1e-8);

    Index general_lift_violations = 0;
    Index general_lift_cases = 0;

    for (Index trial = 0; trial < trials; ++trial) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(trial)));
        const FiniteContext ctx = random_dense_context(n, m, rng);
        const FiniteContext graph = random_graph_context(n, rng);
        const Vector& p = ctx.input_marginal().weights();
        const Vector& q = ctx.context_marginal().weights();
        const ContextureSpectrum spec = contexture_svd(ctx);
        const Vector s = spec.nontrivial_values();
        const Index r = spec.rank();
        const Index d = std::max<Index>(1, std::min<Index>(3, r - 2));

        // context
        suite.guard(c_rows, [&] {
            PointSet pts{random_normal(n, 3, rng), std::nullopt};
            const DiscreteDistribution uni = DiscreteDistribution::uniform(n);
            const FiniteContext built[] = {
                ctx, graph, build_knn_context(pts, std::min<Index>(3, n - 1), uni), build_rbf_context(pts, 0.5, uni),
                build_masked_context(pts, BaseBuilder{BaseBuilder::Kind::knn, std::min<Index>(3, n - 1), 1.0}, 0.34, 3,
                                     rng.next(), uni)};
            for (const auto& c : built) {
                suite.record(c_rows, (c.conditional().rowwise().sum().array() - 1.0).abs().maxCoeff());
                const Vector recomputed = c.conditional().transpose() * c.input_marginal().weights();
                suite.record(c_marg, (recomputed - c.context_marginal().weights()).cwiseAbs().maxCoeff());
            }
        });
        suite.guard(c_balance, [&] {
            const Matrix flow = graph.input_marginal().weights().asDiagonal() * graph.conditional();
            suite.record(c_balance, (flow - flow.transpose()).cwiseAbs().maxCoeff());
        });

        // spectral
        suite.guard(s_dual, [&] {
            const OperatorMatrices op = operator_matrices(ctx);
            for (Index i = 1; i < r; ++i) {
                if (!(spec.singular_values(i) > kClampThreshold)) continue;
                const double si = spec.singular_values(i);
                suite.record(s_dual, wnorm(spec.left.col(i) - op.forward * spec.right.col(i) / si, p));
                suite.record(s_dual, wnorm(spec.right.col(i) - op.adjoint * spec.left.col(i) / si, q));
            }
        });
        suite.guard(s_orth, [&] {
            const Matrix I = Matrix::Identity(r, r);
            suite.record(s_orth, (weighted_gram(spec.left, p) - I).cwiseAbs().maxCoeff());
            suite.record(s_orth, (weighted_gram(spec.right, q) - I).cwiseAbs().maxCoeff());
        });
        suite.guard(s_eig, [&] {
            const Matrix k = dual_kernel(ctx);
            for (Index i = 0; i < r; ++i) {
                const double s2 = spec.singular_values(i) * spec.singular_values(i);
                suite.record(s_eig, wnorm(k * p.cwiseProduct(spec.left.col(i)) - s2 * spec.left.col(i), p));
            }
            suite.record(s_trace, std::abs(spec.singular_values.squaredNorm() - p.dot(k.diagonal())));
        });
        suite.guard(s_jensen, [&] { suite.record(s_jensen, std::max(0.0, spec.singular_values.maxCoeff() - 1.0)); });
        suite.guard(s_joint, [&] { suite.record(s_joint, (reconstruct_joint(spec) - ctx.joint()).cwiseAbs().maxCoeff()); });

        // objectives
        suite.guard(o_min, [&] {
            for (ObjectiveKind kind : kAllObjectives) {
                const bool node = kind == ObjectiveKind::node_embedding;
                const FiniteContext& c = node ? graph : ctx;
                const SpectralSolution sol = solve_spectral(kind, c, d);
                const double best = eval_objective(kind, c, sol.encoder);
                const DiscreteDistribution& w = sol.encoder.marginal();
                const Index size = sol.encoder.size();
                for (int t = 0; t < 200; ++t) {
                    const SampleEncoder rnd(whiten_centered(random_normal(size, d, rng), w.weights()), w,
                                            sol.encoder.support());
                    const double v = eval_objective(kind, c, rnd);
                    suite.record(o_min, std::max(0.0, best - v) / std::max(1.0, std::abs(v)));
                }
                if (kind == ObjectiveKind::multiview_noncontrastive) {
                    const double expect = 2.0 * d - 2.0 * s.head(d).squaredNorm();
                    suite.record(o_closed, std::abs(best - expect));
                } else if (kind == ObjectiveKind::multiview_contrastive) {
                    const double expect = -0.5 * s.head(d).array().pow(4).sum();
                    suite.record(o_closed, std::abs(best - expect));
                } else if (node) {
                    suite.record(o_closed, std::abs(best - (1.0 - sol.eigenvalues.array()).sum()));
                }
            }
        });
        suite.guard(o_linear, [&] {
            const Matrix psi1 = random_normal(m, 2, rng);
            const Matrix psi2 = random_normal(m, 2, rng);
            const double alpha = rng.uniform(-2.0, 2.0);
            const DiscreteDistribution& w = ctx.context_marginal();
            const SampleEncoder a = average_encoder(ctx, SampleEncoder(alpha * psi1 + psi2, w, Support::context));
            const SampleEncoder b1 = average_encoder(ctx, SampleEncoder(psi1, w, Support::context));
            const SampleEncoder b2 = average_encoder(ctx, SampleEncoder(psi2, w, Support::context));
            suite.record(o_linear, (a.values() - (alpha * b1.values() + b2.values())).cwiseAbs().maxCoeff());
        });
        suite.guard(o_collapse, [&] {
            const Index classes = 3;
            const Index per = std::max<Index>(2, n / classes);
            std::vector<int> labels;
            for (Index i = 0; i < classes * per; ++i) labels.push_back(static_cast<int>(i % classes));
            const FiniteContext lab = build_label_context(labels, DiscreteDistribution::uniform(classes * per));
            auto dim = [&](ObjectiveKind k) { return objective_is_centered(k) ? classes - 1 : classes; };
            const SpectralSolution a =
                solve_spectral(ObjectiveKind::supervised_unbiased, lab, dim(ObjectiveKind::supervised_unbiased));
            const SpectralSolution b =
                solve_spectral(ObjectiveKind::supervised_balanced, lab, dim(ObjectiveKind::supervised_balanced));
            const Vector cos = principal_cosines(a.encoder.values(), b.encoder.values(), lab.input_marginal().weights(), true);
            suite.record(o_collapse, 1.0 - cos.minCoeff());
        });

        // evaluation
        const Vector f_raw = random_normal(n, 1, rng).col(0);
        const TaskFunction task{f_raw, ctx.input_marginal()};
        suite.guard(e_rho, [&] {
            const Vector ft = f_raw.array() - p.dot(f_raw);
            const Vector tstar = operator_matrices(ctx).adjoint * ft;
            const Matrix v = spec.right.rightCols(r - 1);
            const Vector coef = v.transpose() * q.asDiagonal() * tstar;
            // max over unit g in span(v) of <f~, T g> = <T* f~, g>_q = |proj T* f~|.
            const double direct = coef.norm() / wnorm(ft, p);
            suite.record(e_rho, std::abs(direct - compatibility(spec, task)));
        });
        suite.guard(e_two, [&] {
            if (r < 4) return;
            const Index dd = std::min<Index>(2, r - 2);
            const double eps = mid_epsilon(s);
            double formula = 0.0;
            try {
                formula = worst_case_err(s, dd, eps);
            } catch (const NumericalError&) {
                return;
            }
            suite.record(e_two, std::abs(two_mode_worst(spec, dd, eps) - formula));
            if (r < 4) return;
            Matrix basis;
            Vector s2;
            full_left_basis(spec, rng, basis, s2);
            const Index k = dd + 1;
            const Matrix sub_basis = basis.leftCols(k);
            const Vector sub_s2 = s2.head(k);
            for (int t = 0; t < 5; ++t) {
                const Matrix phi = random_normal(n, dd, rng);
                const double worst = worst_case_over_span(phi, p, sub_basis, sub_s2, eps);
                suite.record(e_lower, std::max(0.0, formula - worst));
            }
        });
        suite.guard(e_pad, [&] {
            const Index d0 = std::max<Index>(1, std::min<Index>(4, s.size() - 1));
            Vector padded(s.size() + 5);
            padded << s, Vector::Zero(5);
            const UsefulnessReport a = usefulness_metric(s, d0, 1.0);
            const UsefulnessReport b = usefulness_metric(padded, d0, 1.0);
            suite.record(e_pad, (a.tau_curve - b.tau_curve).cwiseAbs().maxCoeff());
        });
        suite.guard(e_rt_mix, [&] {
            const Index dd = std::min<Index>(3, n - 1);
            const Matrix phi = random_normal(n, dd, rng);
            const SampleEncoder a(phi, ctx.input_marginal());
            const SampleEncoder b(phi * random_mixer(dd, rng), ctx.input_marginal());
            const double ra = ratio_trace(a, ctx);
            suite.record(e_rt_mix, std::abs(ra - ratio_trace(b, ctx)) / std::max(1e-12, std::abs(ra)));
            const double bound = s.head(std::min<Index>(dd, s.size())).squaredNorm();
            suite.record(e_rt_bound, std::max(0.0, ra - bound));
            suite.record(e_rt_bound, std::abs(ratio_trace(top_encoder(spec, std::min<Index>(dd, r - 1)), ctx) -
                                              s.head(std::min<Index>(dd, r - 1)).squaredNorm()));
        });
        suite.guard(e_mono, [&] {
            const Matrix phi = random_normal(n, std::min<Index>(5, n - 1), rng);
            double prev = std::numeric_limits<double>::infinity();
            for (Index c = 1; c <= phi.cols(); ++c) {
                const double e = approx_err(SampleEncoder(phi.leftCols(c), ctx.input_marginal()), task);
                suite.record(e_mono, std::max(0.0, e - prev));
                prev = e;
            }
        });
        suite.guard(e_cca, [&] {
            const Index dd = std::min<Index>(3, n - 1);
            const Matrix phi = random_normal(n, dd, rng);
            const SampleEncoder a(phi, ctx.input_marginal());
            for (int t = 0; t < 50; ++t) {
                const SampleEncoder b(phi * random_mixer(dd, rng), ctx.input_marginal());
                suite.record(e_cca, std::abs(cca_alignment(a, b, ctx.input_marginal()) - 1.0));
            }
            suite.record(e_knn, std::abs(mutual_knn(a, a, std::min<Index>(5, n - 1)) - 1.0));
        });
        suite.guard(e_lift, [&] {
            const OperatorMatrices op = operator_matrices(ctx);
            Index usable = 0;
            for (Index i = 1; i < r; ++i)
                if (spec.singular_values(i) > 1e-8) usable = i;
            if (usable < 1) return;
            for (Index i = 1; i <= std::min<Index>(usable, 3); ++i) {
                const CompatibleLift lift = compatible_lift(spec, TaskFunction{spec.left.col(i), ctx.input_marginal()});
                suite.record(e_lift_bound, std::max(0.0, lift.variance_stat - lift.bound));
            }
            const Vector coef = random_normal(usable, 1, rng).col(0);
            const Vector f = spec.left.middleCols(1, usable) * coef;
            const CompatibleLift lift = compatible_lift(spec, TaskFunction{f, ctx.input_marginal()});
            const Vector ft = f.array() - p.dot(f);
            suite.record(e_lift, wnorm(op.forward * lift.g - ft, p) / std::max(1.0, wnorm(ft, p)));
            ++general_lift_cases;
            if (!lift.holds) ++general_lift_violations;
        });
        suite.guard(e_weak, [&] {
            const Vector base = dirichlet(m, rng);
            const double eta = rng.uniform(0.01, 0.3);
            Matrix cond(n, m);
            for (Index i = 0; i < n; ++i) cond.row(i) = ((1.0 - eta) * base + eta * dirichlet(m, rng)).transpose();
            const FiniteContext weak(std::move(cond), DiscreteDistribution::uniform(n), "weak");
            const double dev = (dual_kernel(weak).array() - 1.0).abs().maxCoeff();
            const double mass = contexture_svd(weak).nontrivial_values().squaredNorm();
            suite.record(e_weak, mass < dev ? 0.0 : std::max(mass - dev, 1e-300));
        });
        suite.guard(e_gap, [&] {
            if (r < 4) return;
            const double eps = mid_epsilon(s);
            const Index dd = std::min<Index>(2, r - 2);
            Matrix basis;
            Vector s2;
            full_left_basis(spec, rng, basis, s2);
            for (double delta : {0.02, 0.05, 0.1}) {
                const Matrix phi = spec.top_left(dd) + delta * random_normal(n, dd, rng);
                const SampleEncoder enc(phi, ctx.input_marginal());
                const TraceGapBound tg = trace_gap_bound(enc, ctx, spec, eps);
                if (!tg.valid) continue;
                const double worst = worst_case_over_span(phi, p, basis, s2, eps);
                suite.record(e_gap, std::max(0.0, worst - tg.err_bound));
            }
        });
        suite.guard(e_fisher, [&] {
            const Index dd = std::min<Index>(3, r - 1);
            if (s(0) >= 1.0 - 1e-6) return;
            const double expect = 2.0 * (s.head(dd).array().square() / (1.0 - s.head(dd).array().square())).sum();
            suite.record(e_fisher, std::abs(fisher_discriminant(top_encoder(spec, dd), ctx) - expect) / std::max(1.0, expect));
        });
        suite.guard(e_decay, [&] {
            const double lambda = rng.uniform(0.1, 3.0);
            Vector sv(10);
            for (Index i = 0; i < 10; ++i) sv(i) = std::exp(-0.5 * lambda * static_cast<double>(i + 1));
            suite.record(e_decay, std::abs(decay_rate(sv) - lambda));
        });
        suite.guard(e_indep, [&] {
            const Vector row = dirichlet(m, rng);
            const Matrix cond = Matrix::Ones(n, 1) * row.transpose();
            const FiniteContext indep(cond, DiscreteDistribution::uniform(n), "independent");
            const double beta = rng.uniform(0.5, 2.0);
            const UsefulnessReport u = usefulness_metric(contexture_svd(indep).nontrivial_values(), 3, beta);
            suite.record(e_indep, std::abs(u.tau - (1.0 + beta)));
        });

        // estimation
        suite.guard(x_mix, [&] {
            const Index dd = std::min<Index>(3, r - 1);
            const Matrix phi = spec.top_left(dd) * random_mixer(dd, rng);
            const SampleEncoder enc(phi, ctx.input_marginal());
            const PosthocSpectrum est = estimate_spectrum_posthoc(enc, estimate_covariances(enc, ctx), dd);
            for (Index i = 0; i < dd; ++i)
                suite.record(x_mix, std::abs(est.eigenvalues(i) - s(i) * s(i)) / std::max(1e-12, s(i) * s(i)));
        });
        suite.guard(x_upper, [&] {
            const Index dd = std::min<Index>(3, n - 1);
            const SampleEncoder enc(random_normal(n, dd, rng), ctx.input_marginal());
            const CovariancePair cov = estimate_covariances(enc, ctx, CovarianceMode::pair_sampled, 2000, rng.next());
            const PosthocSpectrum est = estimate_spectrum_posthoc(enc, cov, dd);
            suite.record(x_upper, std::max(0.0, est.eigenvalues.maxCoeff() - 1.0));
        });
        suite.guard(x_full, [&] {
            const Index top = std::min<Index>(3, r - 1);
            const ContextureSpectrum est = estimate_spectrum_subsampled(ctx, n, top, rng.next());
            for (Index i = 1; i < est.rank(); ++i) suite.record(x_full, std::abs(est.singular_values(i) - spec.singular_values(i)));
        });
    }

    // Fixed closed-form instances.
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(trials) + 1000));
    suite.guard(s_channel, [&] {
        const FiniteContext ch = two_state_channel(0.1);
        const ContextureSpectrum sp = contexture_svd(ch);
        suite.record(s_channel, std::abs(sp.singular_values(1) - 0.8));
        const SpectralSolution sol = solve_spectral(ObjectiveKind::multiview_noncontrastive, ch, 1);
        suite.record(s_channel, std::abs(eval_objective(ObjectiveKind::multiview_noncontrastive, ch, sol.encoder) - 0.72));
        const SampleEncoder mu(sp.top_left(1), ch.input_marginal());
        const CovariancePair cov = estimate_covariances(mu, ch, CovarianceMode::pair_sampled, 100000, rng.next());
        suite.record(x_pairs, std::abs(estimate_spectrum_posthoc(mu, cov, 1).eigenvalues(0) - 0.64));
    });
    suite.guard(s_planted, [&] {
        Vector sigma(3);
        sigma << 0.6, 0.6, 0.3;
        const PlantedContext pc = planted_context(std::min<Index>(n, 20), std::min<Index>(m, 20), sigma, rng);
        const ContextureSpectrum sp = contexture_svd(pc.ctx);
        for (Index i = 0; i < 3; ++i) suite.record(s_planted, std::abs(sp.singular_values(i + 1) - pc.sigma(i)));
        const Vector cos = principal_cosines(sp.top_left(2), pc.f.leftCols(2), pc.ctx.input_marginal().weights(), true);
        suite.record(s_planted, 1.0 - cos.minCoeff());
    });
    suite.guard(o_var_span, [&] {
        Vector sigma(4);
        sigma << 0.9, 0.6, 0.35, 0.15;
        const PlantedContext pc = planted_context(10, 10, sigma, rng);
        const FiniteContext graph = planted_graph_context(10, sigma, rng).ctx;
        VariationalOptions opts;
        opts.seed = rng.next();
        for (ObjectiveKind kind : kAllObjectives) {
            const FiniteContext& c = kind == ObjectiveKind::node_embedding ? graph : pc.ctx;
            const Index dd = 2;
            const SpectralSolution sp = solve_spectral(kind, c, dd);
            const VariationalSolution var = solve_variational(kind, c, dd, opts);
            const Vector cos = principal_cosines(sp.encoder.values(), var.encoder.values(),
                                                 sp.encoder.marginal().weights(), objective_is_centered(kind));
            suite.record(o_var_span, 1.0 - cos.minCoeff());
            suite.record(o_var_value,
                         std::abs(eval_objective(kind, c, var.encoder) - eval_objective(kind, c, sp.encoder)));
        }
    });

    std::vector<CheckResult> checks = suite.take();
    if (general_lift_cases > 0) {
        auto& lift = checks[static_cast<std::size_t>(e_lift)];
        if (lift.detail.empty())
            lift.detail = "general-mixture variance bound (not asserted) held in " +
                          std::to_string(general_lift_cases - general_lift_violations) + " of " +
                          std::to_string(general_lift_cases) + " cases";
    }
    VerifyReport report;
    report.n = n;
    report.m = m;
    report.trials = trials;
    report.seed = seed;
    report.checks = std::move(checks);
    return report;
}

} // namespace contexture
