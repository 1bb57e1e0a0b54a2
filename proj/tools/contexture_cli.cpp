// contexture: command-line front end for spectra, metrics, encoders, probes,
// sweeps, and the verification suite.

#include "contexture/dataset.hpp"
#include "contexture/error.hpp"
#include "contexture/estimation.hpp"
#include "contexture/evaluation.hpp"
#include "contexture/experiment.hpp"
#include "contexture/objectives.hpp"
#include "contexture/report.hpp"
#include "contexture/serialization.hpp"
#include "contexture/spectral.hpp"
#include "contexture/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace ct = contexture;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        ct::write_text_atomic(out, text);
    }
}

// Features of `input` z-scored with their own statistics; the target column,
// when named, is excluded and kept as labels.
ct::PointSet load_points(const std::string& input, const std::string& target) {
    ct::LoadedDataset ds = ct::load_features(input, target);
    ct::PointSet pts;
    pts.points = ct::Standardizer::fit(ds.points.points).apply(ds.points.points);
    if (!target.empty()) pts.labels = ds.targets;
    return pts;
}

ct::FiniteContext context_from(const std::string& desc_text, const std::string& input, const std::string& target,
                               const std::string& marginal, std::uint64_t seed) {
    const ct::ContextDescriptor desc = ct::ContextDescriptor::parse(desc_text);
    if (marginal != "uniform") throw ct::InvalidArgument("unsupported marginal '" + marginal + "' (only uniform)");
    if (desc.kind == ct::ContextDescriptor::Kind::graph) {
        ct::PointSet none;
        return ct::build_context(desc, none, ct::DiscreteDistribution(), seed);
    }
    if (input.empty()) throw ct::InvalidArgument("--input is required for " + desc_text);
    const ct::PointSet pts = load_points(input, target);
    return ct::build_context(desc, pts, ct::DiscreteDistribution::uniform(pts.size()), seed);
}

struct SpectrumArgs {
    std::string context, input, target, marginal = "uniform", out;
    ct::Index top = 0;
    ct::Index subsample = 0;
    std::uint64_t seed = 0;
};

int run_spectrum(const SpectrumArgs& a) {
    const ct::FiniteContext ctx = context_from(a.context, a.input, a.target, a.marginal, a.seed);
    const ct::Index full = std::min(ctx.n_inputs(), ctx.n_context());
    if (a.subsample > 0) {
        const ct::Index top = a.top > 0 ? a.top - 1 : full - 1;
        const ct::ContextureSpectrum spec = ct::estimate_spectrum_subsampled(ctx, a.subsample, top, a.seed);
        emit(a.out, ct::dump_json(ct::spectrum_to_json(spec, a.subsample)));
        return kExitOk;
    }
    const ct::Index rank = a.top > 0 ? std::min(a.top, full) : full;
    emit(a.out, ct::dump_json(ct::spectrum_to_json(ct::contexture_svd(ctx, rank))));
    return kExitOk;
}

struct MetricArgs {
    std::string spectrum, out, tau_csv;
    double beta = 1.0;
    ct::Index d0 = 0;
};

int run_metric(const MetricArgs& a) {
    const ct::ContextureSpectrum spec = ct::spectrum_from_json(ct::parse_json_file(a.spectrum));
    const ct::Vector s = spec.nontrivial_values();
    const ct::Index d0 = a.d0 > 0 ? a.d0 : std::max<ct::Index>(1, s.size() - 1);
    ct::UsefulnessReport r = ct::usefulness_metric(s, d0, a.beta);
    try {
        r.decay_rate = ct::decay_rate(s);
    } catch (const ct::InvalidArgument&) {
        r.decay_rate = std::nan("");
    }
    emit(a.out, ct::dump_json(ct::usefulness_to_json(r)));
    if (!a.tau_csv.empty()) ct::write_text_atomic(a.tau_csv, ct::tau_curve_csv(r));
    return kExitOk;
}

struct LearnArgs {
    std::string objective, context, input, target, marginal = "uniform", mode = "spectral", constraint = "whiten", out;
    ct::Index d = 1;
    ct::Index steps = 5000;
    double lr = 0.05;
    std::uint64_t seed = 0;
    bool average = false;
};

int run_learn(const LearnArgs& a) {
    const ct::ObjectiveKind kind = ct::parse_objective(a.objective);
    const ct::FiniteContext ctx = context_from(a.context, a.input, a.target, a.marginal, a.seed);
    ct::SampleEncoder enc;
    ct::Json side;
    if (a.mode == "spectral") {
        const ct::SpectralSolution sol = ct::solve_spectral(kind, ctx, a.d);
        enc = sol.encoder;
        side["eigenvalues"] = ct::vector_to_json(sol.eigenvalues);
    } else if (a.mode == "variational") {
        ct::VariationalOptions opts;
        opts.steps = a.steps;
        opts.learning_rate = a.lr;
        opts.seed = a.seed;
        if (a.constraint == "whiten") opts.constraint_mode = ct::ConstraintMode::whiten;
        else if (a.constraint == "penalty") opts.constraint_mode = ct::ConstraintMode::penalty;
        else throw ct::InvalidArgument("unknown --constraint '" + a.constraint + "' (whiten or penalty)");
        const ct::VariationalSolution sol = ct::solve_variational(kind, ctx, a.d, opts);
        enc = sol.encoder;
        side["iterations"] = sol.iterations;
        side["converged"] = sol.converged;
        side["final_objective"] = sol.trace.empty() ? ct::Json(nullptr) : ct::Json(sol.trace.back());
    } else {
        throw ct::InvalidArgument("unknown --mode '" + a.mode + "' (spectral or variational)");
    }
    side["objective_value"] = ct::eval_objective(kind, ctx, enc);
    if (a.average && enc.support() == ct::Support::context) enc = ct::average_encoder(ctx, enc);
    side["support"] = enc.support() == ct::Support::input ? "input" : "context";
    side["d"] = a.d;
    side["objective"] = ct::to_string(kind);
    side["mode"] = a.mode;
    side["context"] = a.context;
    side["seed"] = a.seed;
    const std::string csv = ct::encoder_csv(enc.values());
    if (a.out.empty() || a.out == "-") {
        std::cout << csv;
    } else {
        ct::write_text_atomic(a.out, csv);
        ct::write_text_atomic(a.out + ".json", ct::dump_json(side));
    }
    return kExitOk;
}

struct EvaluateArgs {
    std::string encoder, input, target, out;
    std::vector<double> ridge_grid{1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0};
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
};

int run_evaluate(const EvaluateArgs& a) {
    const ct::Matrix x = ct::read_matrix_csv(a.encoder);
    const ct::LoadedDataset ds = ct::load_dataset(a.input, a.target);
    const ct::Index n = x.rows();
    if (ds.targets.size() != n)
        throw ct::InvalidArgument("encoder has " + std::to_string(n) + " rows but the dataset has " +
                                  std::to_string(ds.targets.size()));
    if (!(a.test_fraction > 0.0 && a.test_fraction < 1.0)) throw ct::InvalidArgument("--test-fraction must lie in (0, 1)");
    ct::Rng rng(a.seed);
    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    const auto n_test = static_cast<ct::Index>(std::floor(a.test_fraction * static_cast<double>(n) + 1e-9));
    if (n_test < 1 || n_test >= n - 1) throw ct::InvalidArgument("test split is empty or leaves too few training rows");
    std::vector<ct::Index> train, test;
    for (ct::Index i = 0; i < n; ++i) (i < n - n_test ? train : test).push_back(static_cast<ct::Index>(perm[i]));
    const ct::Vector ytr_raw = ds.targets(train);
    const double mean = ytr_raw.mean();
    const double sd = std::sqrt((ytr_raw.array() - mean).square().mean());
    const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
    const ct::Vector ytr = (ytr_raw.array() - mean) * scale;
    const ct::Vector yte = (ds.targets(test).array() - mean) * scale;
    const ct::ProbeResult r =
        ct::fit_linear_probe(x(train, Eigen::all), ytr, x(test, Eigen::all), yte, a.ridge_grid, ct::mix_seed(a.seed, 1));
    ct::Json j = ct::probe_to_json(r);
    j["n_train"] = train.size();
    j["n_test"] = test.size();
    j["target"] = a.target;
    emit(a.out, ct::dump_json(j));
    return kExitOk;
}

struct ExperimentArgs {
    std::string config, out, format = "json";
    unsigned threads = 0;
};

int run_experiment_cmd(const ExperimentArgs& a) {
    ct::ExperimentConfig cfg = ct::ExperimentConfig::load(a.config);
    if (a.threads > 0) cfg.threads = a.threads;
    const ct::ExperimentReport report = ct::run_experiment(cfg);
    const ct::ReportFormat format = ct::parse_report_format(a.format);
    if (a.out.empty() || a.out == "-") std::cout << ct::render_report(report, format);
    else ct::write_report(report, a.out, format);
    std::cerr << "contexts: " << report.n_ok << " of " << report.per_context.size() << " succeeded";
    if (std::isfinite(report.pearson))
        std::cerr << "; pearson " << report.pearson << ", distance correlation " << report.distance_corr;
    std::cerr << "\n";
    return kExitOk;
}

struct VerifyArgs {
    ct::Index n = 12, m = 10, trials = 3;
    std::uint64_t seed = 0;
    std::string out, format = "json";
};

int run_verify(const VerifyArgs& a) {
    const ct::VerifyReport report = ct::verify_theorems(a.n, a.m, a.trials, a.seed);
    const ct::ReportFormat format = ct::parse_report_format(a.format);
    if (a.out.empty() || a.out == "-") std::cout << ct::render_report(report, format);
    else ct::write_report(report, a.out, format);
    for (const auto& c : report.checks)
        if (!c.passed) std::cerr << "FAIL " << c.name << " (max residual " << c.max_residual << ", tolerance " << c.tolerance
                                 << ") " << c.detail << "\n";
    std::cerr << report.checks.size() - static_cast<std::size_t>(report.failures()) << " of " << report.checks.size()
              << " checks passed\n";
    return report.all_passed() ? kExitOk : kExitVerification;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of contexts for representation learning"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "contexture 0.1.0");

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "Singular values and functions of a context");
    spectrum->add_option("--context", sa.context, "Context descriptor (knn:K, rbf:GAMMA, knn+mask:K:F:N, label, graph:PATH)")
        ->required();
    spectrum->add_option("--input", sa.input, "Dataset CSV with a header row");
    spectrum->add_option("--target", sa.target, "Column excluded from features (label source for 'label')");
    spectrum->add_option("--marginal", sa.marginal, "Input marginal")->check(CLI::IsMember({"uniform"}));
    spectrum->add_option("--top", sa.top, "Number of modes including the constant one (default: all)");
    spectrum->add_option("--subsample", sa.subsample, "Estimate from this many subsampled rows");
    spectrum->add_option("--seed", sa.seed, "Seed for masks and subsampling");
    spectrum->add_option("--out", sa.out, "Output JSON (default: stdout)");

    MetricArgs ma;
    auto* metric = app.add_subcommand("metric", "Usefulness metric tau from a spectrum");
    metric->add_option("--spectrum", ma.spectrum, "Spectrum JSON")->required();
    metric->add_option("--beta", ma.beta, "Weight of the spectral-mass term");
    metric->add_option("--d0", ma.d0, "Largest dimension considered (default: rank - 2)");
    metric->add_option("--out", ma.out, "Output JSON (default: stdout)");
    metric->add_option("--tau-csv", ma.tau_csv, "Also write the tau_d curve as CSV");

    LearnArgs la;
    auto* learn = app.add_subcommand("learn", "Fit an encoder by closed form or gradient descent");
    learn->add_option("--objective", la.objective, "Objective name")->required();
    learn->add_option("--context", la.context, "Context descriptor")->required();
    learn->add_option("--input", la.input, "Dataset CSV");
    learn->add_option("--target", la.target, "Column excluded from features");
    learn->add_option("--d", la.d, "Encoder dimension")->required();
    learn->add_option("--mode", la.mode, "spectral or variational")->check(CLI::IsMember({"spectral", "variational"}));
    learn->add_option("--steps", la.steps, "Gradient steps (variational)");
    learn->add_option("--lr", la.lr, "Initial step size (variational)");
    learn->add_option("--constraint", la.constraint, "whiten or penalty (variational)");
    learn->add_option("--seed", la.seed, "Seed");
    learn->add_flag("--average", la.average, "Map a context-support encoder to the inputs");
    learn->add_option("--out", la.out, "Encoder CSV; a .json sidecar is written next to it");

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Ridge linear probe on a frozen encoder");
    evaluate->add_option("--encoder", ea.encoder, "Encoder CSV (rows aligned with --input)")->required();
    evaluate->add_option("--input", ea.input, "Dataset CSV holding the target")->required();
    evaluate->add_option("--target", ea.target, "Target column")->required();
    evaluate->add_option("--ridge-grid", ea.ridge_grid, "Ridge penalties")->delimiter(',');
    evaluate->add_option("--test-fraction", ea.test_fraction, "Held-out fraction");
    evaluate->add_option("--seed", ea.seed, "Seed");
    evaluate->add_option("--out", ea.out, "Output JSON (default: stdout)");

    ExperimentArgs xa;
    auto* experiment = app.add_subcommand("experiment", "Context-grid sweep: tau versus probe error");
    experiment->add_option("--config", xa.config, "Config file")->required();
    experiment->add_option("--out", xa.out, "Report path (default: stdout)");
    experiment->add_option("--format", xa.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    experiment->add_option("--threads", xa.threads, "Override the config's thread count");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "Run the invariant checks on random contexts");
    verify->add_option("--n", va.n, "Input support size (3..80)");
    verify->add_option("--m", va.m, "Context support size (3..80)");
    verify->add_option("--trials", va.trials, "Random contexts");
    verify->add_option("--seed", va.seed, "Seed");
    verify->add_option("--out", va.out, "Report path (default: stdout)");
    verify->add_option("--format", va.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*spectrum) return run_spectrum(sa);
        if (*metric) return run_metric(ma);
        if (*learn) return run_learn(la);
        if (*evaluate) return run_evaluate(ea);
        if (*experiment) return run_experiment_cmd(xa);
        if (*verify) return run_verify(va);
    } catch (const ct::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ct::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
