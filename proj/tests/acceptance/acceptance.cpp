// Acceptance suite: one PASS/FAIL line per criterion.
//
//   contexture_acceptance [--data-dir DIR] [--cli PATH] [--work-dir DIR]

#include "oracles.hpp"
#include "planted.hpp"

#include "contexture/error.hpp"
#include "contexture/estimation.hpp"
#include "contexture/evaluation.hpp"
#include "contexture/experiment.hpp"
#include "contexture/objectives.hpp"
#include "contexture/report.hpp"
#include "contexture/serialization.hpp"
#include "contexture/spectral.hpp"
#include "contexture/verify.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace contexture;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

Matrix orthonormal_functions(Index n, Index k, const Vector& w, Rng& rng) {
    // columns 0..k-1 centered and orthonormal in L2(w)
    Matrix raw(n, k + 1);
    raw.col(0).setOnes();
    raw.rightCols(k) = random_normal(n, k, rng);
    const Vector sw = w.cwiseSqrt();
    const Matrix q = Eigen::HouseholderQR<Matrix>(sw.asDiagonal() * raw).householderQ() * Matrix::Identity(n, k + 1);
    return sw.cwiseInverse().asDiagonal() * q.rightCols(k);
}

// ---------------------------------------------------------------------------

Outcome criterion_spectral_core() {
    const auto t0 = Clock::now();
    Rng rng(2024);
    double worst_dual = 0.0, worst_joint = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Index n = 2 + static_cast<Index>(rng.index(59));
        const Index m = 2 + static_cast<Index>(rng.index(59));
        const auto ctx = random_dense_context(n, m, rng);
        const auto spec = contexture_svd(ctx);
        const auto op = operator_matrices(ctx);
        const Vector& p = ctx.input_marginal().weights();
        for (Index i = 0; i < spec.rank(); ++i) {
            const double s = spec.singular_values(i);
            if (s <= 1e-10) continue;
            const Vector r = spec.left.col(i) - apply_operator(op, Direction::forward, Vector(spec.right.col(i))) / s;
            worst_dual = std::max(worst_dual, std::sqrt(oracle::weighted_dot(r, r, p)));
        }
        worst_joint = std::max(worst_joint, (reconstruct_joint(spec) - ctx.joint()).cwiseAbs().maxCoeff());
    }
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = worst_dual <= 1e-8 && worst_joint <= 1e-8 && t < 30.0;
    o.detail = "max duality residual " + fmt(worst_dual) + ", max joint error " + fmt(worst_joint) + ", " + fmt(t) + " s";
    return o;
}

Outcome criterion_objective_equivalence() {
    const auto t0 = Clock::now();
    Rng rng(7);
    const Index d = 3;
    double min_cos = 1.0, max_dv = 0.0;
    Index runs = 0, skipped = 0;
    for (auto kind : kAllObjectives) {
        Index done = 0;
        while (done < 20) {
            const Index n = 8 + static_cast<Index>(rng.index(33));
            const Index m = 8 + static_cast<Index>(rng.index(33));
            const bool node = kind == ObjectiveKind::node_embedding;
            const auto ctx = node ? random_graph_context(n, rng) : random_dense_context(n, m, rng);
            const auto wide = solve_spectral(kind, ctx, d + 1);
            if (std::abs(wide.eigenvalues(d - 1) - wide.eigenvalues(d)) <= 1e-3) {
                ++skipped;
                continue;
            }
            const auto sol = solve_spectral(kind, ctx, d);
            VariationalOptions opts;
            opts.seed = rng.next();
            const auto var = solve_variational(kind, ctx, d, opts);
            const Vector cos = principal_cosines(sol.encoder.values(), var.encoder.values(), sol.encoder.marginal().weights(),
                                                 objective_is_centered(kind));
            min_cos = std::min(min_cos, cos.minCoeff());
            max_dv = std::max(max_dv, std::abs(eval_objective(kind, ctx, var.encoder) - eval_objective(kind, ctx, sol.encoder)));
            ++done;
            ++runs;
        }
    }
    // closed-form optimum the checks above are anchored to
    const auto ch = two_state_channel(0.1);
    const double ln = eval_objective(ObjectiveKind::multiview_noncontrastive, ch,
                                     solve_variational(ObjectiveKind::multiview_noncontrastive, ch, 1).encoder);
    const double t = seconds_since(t0);
    Outcome o;
    o.pass = min_cos >= 0.99 && max_dv <= 1e-3 && std::abs(ln - 0.72) <= 1e-3 && t < 300.0;
    o.detail = std::to_string(runs) + " runs (" + std::to_string(skipped) + " near-degenerate contexts redrawn), min cosine " +
               fmt(min_cos) + ", max value gap " + fmt(max_dv) + ", L_N on channel " + fmt(ln) + ", " + fmt(t) + " s";
    return o;
}

// max of b^T A b over unit b in R^k, k in {2, 3}, subject to b^T S b >= c with
// S = diag(s2). Candidates: the unconstrained top eigenvector when feasible,
// and a dense sweep of the constraint boundary refined by golden section.
double constrained_max(const Matrix& a, const Vector& s2, double c) {
    const Index k = a.rows();
    const Vector g = s2.array() - c;
    auto value = [&](const Vector& b) { return b.dot(a * b); };
    double best = -1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    for (Index j = 0; j < k; ++j) {
        const Vector v = eig.eigenvectors().col(j);
        if (v.dot(g.asDiagonal() * v) >= 0.0) best = std::max(best, value(v));
    }
    // boundary: b = (cos f, sin f * dir(psi)) with tan^2 f = -g0 / (g . dir^2)
    auto boundary = [&](double psi, int sign_b) -> double {
        Vector dir(k - 1);
        if (k == 2) dir << 1.0;
        else dir << std::cos(psi), std::sin(psi);
        const double denom = g.tail(k - 1).dot(dir.cwiseProduct(dir));
        if (!(denom < 0.0)) return -1.0;
        const double f = std::atan(std::sqrt(-g(0) / denom));
        Vector b(k);
        b(0) = std::cos(f);
        b.tail(k - 1) = sign_b * std::sin(f) * dir;
        return value(b);
    };
    const int grid = k == 2 ? 1 : 20000;
    for (int sgn : {1, -1}) {
        std::vector<double> vals(static_cast<std::size_t>(grid));
        for (int i = 0; i < grid; ++i) vals[static_cast<std::size_t>(i)] = boundary(2.0 * M_PI * i / grid, sgn);
        for (int i = 0; i < grid; ++i) {
            const double v = vals[static_cast<std::size_t>(i)];
            best = std::max(best, v);
            if (k == 2 || v < 0.0) continue;
            const auto prev = vals[static_cast<std::size_t>((i + grid - 1) % grid)];
            const auto next = vals[static_cast<std::size_t>((i + 1) % grid)];
            if (v < prev || v < next) continue;
            double lo = 2.0 * M_PI * (i - 1) / grid, hi = 2.0 * M_PI * (i + 1) / grid;
            const double r = (std::sqrt(5.0) - 1.0) / 2.0;
            for (int it = 0; it < 60; ++it) {
                const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
                if (boundary(m1, sgn) > boundary(m2, sgn)) hi = m2;
                else lo = m1;
            }
            best = std::max(best, boundary(0.5 * (lo + hi), sgn));
        }
    }
    return best;
}

Outcome criterion_worst_case() {
    Rng rng(99);
    double max_formula_gap = 0.0, min_encoder_margin = 1e9;
    Index encoders = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Index len = 3 + static_cast<Index>(rng.index(4));
        Vector s(len);
        for (Index i = 0; i < len; ++i) s(i) = rng.uniform(0.1, 0.95);
        std::sort(s.data(), s.data() + len, std::greater<>());
        for (Index i = 1; i < len; ++i) s(i) = std::min(s(i), s(i - 1) - 0.02);
        s = s.cwiseMax(0.01);
        const Index d = 1 + static_cast<Index>(rng.index(2));
        const double lo = 1.0 - s(0), hi = 1.0 - std::sqrt((s(0) * s(0) + s(1) * s(1)) / 2.0);
        const double eps = lo + rng.uniform(0.05, 0.95) * (hi - lo);
        const double formula = worst_case_err(s, d, eps);
        const double c = (1.0 - eps) * (1.0 - eps);

        const Index n = 12;
        const Vector w = oracle::random_marginal(n, rng);
        const Matrix mu = orthonormal_functions(n, d + 1, w, rng);  // mu_1..mu_{d+1}
        const double s1 = s(0), sd1 = d < len ? s(d) : 0.0;
        const Matrix top = mu.leftCols(d);

        // two-mode family f = cos t mu_1 + sin t mu_{d+1}, top-d encoder
        auto two_mode = [&](double t) {
            const double r2 = std::cos(t) * std::cos(t) * s1 * s1 + std::sin(t) * std::sin(t) * sd1 * sd1;
            if (r2 < c) return -1.0;
            const Vector f = std::cos(t) * mu.col(0) + std::sin(t) * mu.col(d);
            return oracle::approx_err(top, f, w);
        };
        const int grid = 4000;
        double best = -1.0;
        int arg = 0;
        for (int i = 0; i <= grid; ++i) {
            const double v = two_mode(0.5 * M_PI * i / grid);
            if (v > best) best = v, arg = i;
        }
        // the maximum sits on the feasibility boundary; bisect it
        double a = 0.5 * M_PI * arg / grid, b = 0.5 * M_PI * std::min(arg + 1, grid) / grid;
        for (int it = 0; it < 80 && arg < grid; ++it) {
            const double mid = 0.5 * (a + b);
            if (two_mode(mid) >= 0.0) a = mid;
            else b = mid;
        }
        best = std::max(best, two_mode(a));
        max_formula_gap = std::max(max_formula_gap, std::abs(best - formula));

        // arbitrary d-dim encoders: worst case over f in span(mu_1..mu_{d+1})
        Vector s2(d + 1);
        for (Index i = 0; i <= d; ++i) s2(i) = i < len ? s(i) * s(i) : 0.0;
        for (int e = 0; e < 5; ++e) {
            Matrix phi = random_normal(n, d, rng);
            phi.rowwise() -= w.transpose() * phi;
            const Matrix q = weighted_orthonormal_basis(phi, w);
            const Matrix g = q.transpose() * w.asDiagonal() * mu;
            const Matrix amat = Matrix::Identity(d + 1, d + 1) - g.transpose() * g;
            const double worst = constrained_max(amat, s2, c);
            min_encoder_margin = std::min(min_encoder_margin, worst - formula);
            ++encoders;
        }
    }
    Outcome o;
    o.pass = max_formula_gap <= 1e-4 && min_encoder_margin >= -1e-6;
    o.detail = "20 spectra: max |formula - two-mode max| " + fmt(max_formula_gap) + "; " + std::to_string(encoders) +
               " encoders: min (worst case - formula) " + fmt(min_encoder_margin);
    return o;
}

Outcome criterion_tau() {
    Vector s(3);
    s << std::sqrt(0.8), std::sqrt(0.5), std::sqrt(0.2);
    const auto r = usefulness_metric(s, 3, 1.0);
    const bool arith = std::abs(r.tau_curve(0) - 2.5333) <= 1e-4 && std::abs(r.tau_curve(1) - 2.1167) <= 1e-4 &&
                       std::abs(r.tau - 2.0) <= 1e-4 && r.d_star_metric == 3;
    Matrix q(5, 4);
    for (Index i = 0; i < 5; ++i) q.row(i) << 0.1, 0.2, 0.3, 0.4;
    const FiniteContext ind(q, DiscreteDistribution::uniform(5), "independent");
    const double beta = 1.0;
    const auto ri = usefulness_metric(contexture_svd(ind).nontrivial_values(), 3, beta);
    Outcome o;
    o.pass = arith && ri.tau == 1.0 + beta;
    o.detail = "tau_1 " + fmt(r.tau_curve(0)) + ", tau_2 " + fmt(r.tau_curve(1)) + ", tau " + fmt(r.tau) +
               " at d=" + std::to_string(r.d_star_metric) + "; independent context tau " + format_double(ri.tau);
    return o;
}

Outcome criterion_association() {
    double max_decay_err = 0.0;
    for (double lambda : {0.05, 0.2, 0.5, 1.0, 2.5, 7.0}) {
        Vector s(20);
        for (Index i = 0; i < 20; ++i) s(i) = std::exp(-0.5 * lambda * static_cast<double>(i + 1));
        max_decay_err = std::max(max_decay_err, std::abs(decay_rate(s) - lambda));
    }
    Rng rng(5);
    Index violations = 0;
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const Index n = 3 + static_cast<Index>(rng.index(30)), m = 3 + static_cast<Index>(rng.index(30));
        Vector base(m);
        for (Index a = 0; a < m; ++a) base(a) = 0.2 + rng.uniform();
        base /= base.sum();
        const double amp = std::pow(10.0, rng.uniform(-4.0, -0.5));
        Matrix q(n, m);
        for (Index x = 0; x < n; ++x) {
            for (Index a = 0; a < m; ++a) q(x, a) = base(a) * (1.0 + amp * rng.uniform(-1.0, 1.0));
            q.row(x) /= q.row(x).sum();
        }
        const FiniteContext ctx(q, DiscreteDistribution(oracle::random_marginal(n, rng)), "perturbed");
        const double dev = (dual_kernel(ctx).array() - 1.0).abs().maxCoeff();
        const double eps = dev * (1.0 + 1e-9) + 1e-15;  // any eps above the observed deviation
        const double mass = contexture_svd(ctx).nontrivial_values().squaredNorm();
        if (!(mass < eps)) ++violations;
        worst_ratio = std::max(worst_ratio, mass / eps);
    }
    Outcome o;
    o.pass = max_decay_err <= 1e-6 && violations == 0;
    o.detail = "max decay-rate error " + fmt(max_decay_err) + "; weak association violations " + std::to_string(violations) +
               "/100 (max sum s^2 / eps " + fmt(worst_ratio) + ")";
    return o;
}

Outcome criterion_estimation() {
    Rng rng(31);
    double max_eig_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto ctx = random_dense_context(10 + static_cast<Index>(rng.index(30)), 8 + static_cast<Index>(rng.index(30)), rng);
        const auto spec = contexture_svd(ctx);
        const Index d = 1 + static_cast<Index>(rng.index(4));
        const Matrix mix = random_normal(d, d, rng) + 3.0 * Matrix::Identity(d, d);
        const SampleEncoder enc(spec.top_left(d) * mix, ctx.input_marginal());
        const auto est = estimate_spectrum_posthoc(enc, estimate_covariances(enc, ctx), d);
        const Vector truth = spec.singular_values.segment(1, d).array().square();
        max_eig_err = std::max(max_eig_err, (est.eigenvalues - truth).cwiseAbs().maxCoeff());
    }
    const auto ch = two_state_channel(0.1);
    const auto chs = contexture_svd(ch);
    const auto pair = estimate_covariances(SampleEncoder(chs.left.col(1), ch.input_marginal()), ch, CovarianceMode::pair_sampled,
                                           100000, 11);
    const double b = pair.b_phi(0, 0);

    PointSet ps;
    ps.points = random_normal(64, 3, rng);
    const auto ctx = build_rbf_context(ps, 0.3, DiscreteDistribution::uniform(64));
    const Index top = 6;
    const Vector truth = contexture_svd(ctx).singular_values.segment(1, top).array().square();
    std::vector<double> errs;
    for (Index m : {8, 16, 32, 64}) {
        double e = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Vector s2 = estimate_spectrum_subsampled(ctx, m, top, seed).nontrivial_values().array().square();
            for (Index i = 0; i < top; ++i) e += std::abs((i < s2.size() ? s2(i) : 0.0) - truth(i)) / top;
        }
        errs.push_back(e / 20.0);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < errs.size(); ++i) monotone = monotone && errs[i] <= errs[i - 1] + 0.01;
    Outcome o;
    o.pass = max_eig_err <= 1e-8 && std::abs(b - 0.64) <= 0.01 && monotone;
    o.detail = "posthoc max error " + fmt(max_eig_err) + "; pair-sampled B " + fmt(b) + "; mean error over m=8,16,32,64: " +
               fmt(errs[0]) + ", " + fmt(errs[1]) + ", " + fmt(errs[2]) + ", " + fmt(errs[3]) +
               " (reference trend 0.157 -> 0.088)";
    return o;
}

Outcome criterion_sweep(const std::string& data_dir) {
    ExperimentConfig config;
    config.d0 = 16;
    config.d_grid = {1, 2, 4, 8, 16};
    config.seed = 3;
    config.context_grid.clear();
    for (int i = 0; i < 10; ++i) config.context_grid.push_back("rbf:" + format_double(std::pow(10.0, -2.0 + 3.0 * i / 9.0)));
    for (int k : {2, 3, 4, 6, 8, 12, 16, 24, 32, 48}) config.context_grid.push_back("knn:" + std::to_string(k));
    const std::string planted_desc = "knn:8";

    const auto data = planted::dataset(240, 3, planted_desc, config, 41);
    const auto rep = run_experiment(config, data);
    std::string best;
    double best_err = 1e300;
    for (const auto& c : rep.per_context)
        if (c.ok && c.err_d_star < best_err) best_err = c.err_d_star, best = c.descriptor;
    const bool ranked = best == planted_desc;
    const bool positive = std::isfinite(rep.pearson) && rep.pearson > 0.0;

    std::string real;
    Index completed = 0;
    for (const char* name : {"diabetes", "breast_cancer", "wine"}) {
        ExperimentConfig rc;
        rc.dataset_path = (fs::path(data_dir) / (std::string(name) + ".csv")).string();
        rc.target_column = "target";
        rc.seed = 0;
        try {
            const auto r = run_experiment(rc);
            ++completed;
            real += std::string("; ") + name + ": " + std::to_string(r.n_ok) + "/" + std::to_string(r.per_context.size()) +
                    " contexts, pearson " + fmt(r.pearson) + ", distance " + fmt(r.distance_corr);
        } catch (const std::exception& e) {
            real += std::string("; ") + name + ": failed (" + e.what() + ")";
        }
    }
    Outcome o;
    o.pass = ranked && positive && completed >= 3;
    o.detail = "planted " + planted_desc + " ranked first: " + (ranked ? "yes" : "no (best " + best + ")") + ", err " +
               fmt(best_err) + ", 20-context pearson " + fmt(rep.pearson) + real +
               "; reference medians pearson 0.587, distance 0.659 (not asserted)";
    return o;
}

Outcome criterion_alignment() {
    Rng rng(17);
    const auto ctx = random_dense_context(30, 25, rng);
    const auto spec = contexture_svd(ctx);
    const auto& p = ctx.input_marginal();
    const SampleEncoder base(random_normal(30, 4, rng), p);
    double worst_mix = 0.0;
    for (int i = 0; i < 50; ++i) {
        Matrix a = random_normal(4, 4, rng);
        while (std::abs(a.determinant()) < 0.1) a = random_normal(4, 4, rng);
        worst_mix = std::max(worst_mix, std::abs(cca_alignment(base, SampleEncoder(base.values() * a, p), p) - 1.0));
    }
    Matrix white = base.centered() * inverse_sqrt_psd(base.covariance());
    const double knn = mutual_knn(SampleEncoder(white, p), SampleEncoder(white, p), 5);
    Matrix m12(30, 2), m13(30, 2);
    m12 << spec.left.col(1), spec.left.col(2);
    m13 << spec.left.col(1), spec.left.col(3);
    const double half = cca_alignment(SampleEncoder(m12, p), SampleEncoder(m13, p), p);
    Outcome o;
    o.pass = worst_mix <= 1e-8 && knn == 1.0 && std::abs(half - 0.5) <= 1e-8;
    o.detail = "max |CCA - 1| over 50 mixes " + fmt(worst_mix) + "; mutual knn " + fmt(knn) + "; [mu1,mu2] vs [mu1,mu3] " +
               format_double(half);
    return o;
}

int run_command(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    return rc;
}

Outcome criterion_determinism(const std::string& cli, const std::string& work_dir) {
    const auto v1 = render_report(verify_theorems(12, 10, 2, 8), ReportFormat::json);
    const auto v2 = render_report(verify_theorems(12, 10, 2, 8), ReportFormat::json);
    Rng rng(1);
    LoadedDataset data;
    data.feature_names = {"a", "b"};
    data.target_name = "y";
    data.points.points = random_normal(90, 2, rng);
    data.targets = data.points.points.col(0).array().cos();
    ExperimentConfig config;
    config.context_grid = {"knn:3", "rbf:0.5", "knn+mask:4:0.5:3", "rbf:2"};
    config.d0 = 8;
    config.d_grid = {1, 2, 4};
    config.seed = 12;
    const auto e1 = render_report(run_experiment(config, data), ReportFormat::json);
    config.threads = 3;
    const auto e2 = render_report(run_experiment(config, data), ReportFormat::json);
    bool ok = v1 == v2 && e1 == e2;
    std::string detail = std::string("library verify ") + (v1 == v2 ? "identical" : "DIFFERENT") + ", experiment (1 vs 3 threads) " +
                         (e1 == e2 ? "identical" : "DIFFERENT");
    if (!cli.empty()) {
        const fs::path dir = fs::path(work_dir) / "acceptance_determinism";
        fs::create_directories(dir);
        const std::string csv = (dir / "d.csv").string();
        std::string text = "a,b,target\n";
        for (Index i = 0; i < 90; ++i)
            text += format_double(data.points.points(i, 0)) + "," + format_double(data.points.points(i, 1)) + "," +
                    format_double(data.targets(i)) + "\n";
        write_text_atomic(csv, text);
        write_text_atomic((dir / "c.ini").string(), "dataset = d.csv\ntarget = target\ncontexts = knn:3, rbf:0.5, rbf:2\n"
                                                    "d0 = 8\nd_grid = 1,2,4\nseed = 4\n");
        const std::string q = "\"";
        int rc = 0;
        for (int run = 1; run <= 2; ++run) {
            const std::string r = std::to_string(run);
            rc |= run_command(q + cli + q + " verify --n 10 --m 9 --trials 2 --seed 3 --out " + q + (dir / ("v" + r + ".json")).string() + q);
            rc |= run_command(q + cli + q + " experiment --config " + q + (dir / "c.ini").string() + q + " --out " + q +
                              (dir / ("e" + r + ".json")).string() + q);
        }
        const bool vs = read_text((dir / "v1.json").string()) == read_text((dir / "v2.json").string());
        const bool es = read_text((dir / "e1.json").string()) == read_text((dir / "e2.json").string());
        ok = ok && rc == 0 && vs && es;
        detail += std::string("; cli verify ") + (vs ? "identical" : "DIFFERENT") + ", cli experiment " + (es ? "identical" : "DIFFERENT") +
                  (rc ? " (a cli run failed)" : "");
        std::error_code ec;
        fs::remove_all(dir, ec);
    } else {
        detail += "; cli not given";
    }
    Outcome o;
    o.pass = ok;
    o.detail = detail;
    return o;
}

} // namespace

int main(int argc, char** argv) {
    std::string data_dir = "data", cli, work_dir = fs::temp_directory_path().string();
    for (int i = 1; i + 1 < argc; i += 2) {
        const std::string key = argv[i];
        if (key == "--data-dir") data_dir = argv[i + 1];
        else if (key == "--cli") cli = fs::absolute(argv[i + 1]).string();
        else if (key == "--work-dir") work_dir = argv[i + 1];
        else {
            std::cerr << "unknown option " << key << "\n";
            return 1;
        }
    }
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"spectral core: duality and joint reconstruction", criterion_spectral_core},
        {"objective equivalence: variational vs closed form", criterion_objective_equivalence},
        {"worst-case error vs brute force", criterion_worst_case},
        {"metric arithmetic", criterion_tau},
        {"association measures", criterion_association},
        {"eigenvalue estimation", criterion_estimation},
        {"end-to-end sweep", [&] { return criterion_sweep(data_dir); }},
        {"alignment metrics", criterion_alignment},
        {"determinism", [&] { return criterion_determinism(cli, work_dir); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << std::endl;
    }
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failures ? 1 : 0;
}
