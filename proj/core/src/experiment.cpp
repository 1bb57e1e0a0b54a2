#include "contexture/experiment.hpp"

#include "contexture/error.hpp"
#include "contexture/random.hpp"
#include "contexture/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

namespace contexture {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    if (b != e && *b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw InvalidArgument("config key '" + key + "': '" + s + "' is not a number");
    return v;
}

template <typename T>
T to_integer(const std::string& key, const std::string& s) {
    T v{};
    const char* b = s.data();
    const char* e = b + s.size();
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) throw InvalidArgument("config key '" + key + "': '" + s + "' is not an integer");
    return v;
}

// k nearest reference rows of each row, or the single coinciding row.
std::vector<std::vector<Index>> neighbor_lists(const Matrix& reference, const Matrix& rows, Index k) {
    const Index n = reference.rows();
    if (n < 1) throw InvalidArgument("extend_encoder: empty reference set");
    if (rows.cols() != reference.cols()) throw InvalidArgument("extend_encoder: feature count mismatch");
    if (k < 1) throw InvalidArgument("extend_encoder: k must be at least 1");
    const Index kk = std::min(k, n);
    std::vector<std::vector<Index>> out(static_cast<std::size_t>(rows.rows()));
    std::vector<std::pair<double, Index>> dist(static_cast<std::size_t>(n));
    for (Index i = 0; i < rows.rows(); ++i) {
        for (Index j = 0; j < n; ++j) dist[static_cast<std::size_t>(j)] = {(reference.row(j) - rows.row(i)).squaredNorm(), j};
        std::partial_sort(dist.begin(), dist.begin() + kk, dist.end());
        auto& nb = out[static_cast<std::size_t>(i)];
        if (dist[0].first == 0.0) {
            nb.push_back(dist[0].second);
        } else {
            for (Index t = 0; t < kk; ++t) nb.push_back(dist[static_cast<std::size_t>(t)].second);
        }
    }
    return out;
}

Matrix apply_neighbors(const std::vector<std::vector<Index>>& nbrs, const Matrix& values) {
    Matrix out = Matrix::Zero(static_cast<Index>(nbrs.size()), values.cols());
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (Index j : nbrs[i]) out.row(static_cast<Index>(i)) += values.row(j);
        out.row(static_cast<Index>(i)) /= static_cast<double>(nbrs[i].size());
    }
    return out;
}

struct Shared {
    const ExperimentConfig& config;
    const LoadedDataset& data;
    const PreparedData& prep;
    std::vector<std::vector<Index>> down_nbrs;
    std::vector<std::vector<Index>> test_nbrs;
};

ContextResult run_context(const Shared& sh, const ContextDescriptor& desc, std::uint64_t stream_seed) {
    ContextResult r;
    r.descriptor = desc.to_string();
    if (desc.kind == ContextDescriptor::Kind::graph)
        throw InvalidArgument("graph contexts define their own input support and cannot be built from dataset rows");

    const auto& cfg = sh.config;
    const auto& prep = sh.prep;
    PointSet pts;
    pts.points = prep.pretrain;
    if (desc.kind == ContextDescriptor::Kind::label) {
        if (!sh.data.categorical) throw InvalidArgument("label context requires a categorical target");
        pts.labels = sh.data.targets(prep.splits[0]);
    }
    const Index n = pts.size();
    const FiniteContext ctx = build_context(desc, pts, DiscreteDistribution::uniform(n), stream_seed);
    const Index full = std::min(ctx.n_inputs(), ctx.n_context());
    const ContextureSpectrum spec = contexture_svd(ctx, std::min(cfg.d0 + 2, full));

    const Vector s = spec.nontrivial_values();
    const UsefulnessReport use = usefulness_metric(s, cfg.d0, cfg.beta);
    r.tau_curve = use.tau_curve;
    r.tau = use.tau;
    r.d_star_metric = use.d_star_metric;
    r.degenerate = use.degenerate;
    try {
        r.decay_rate = decay_rate(s);
    } catch (const Error&) {
        r.decay_rate = std::numeric_limits<double>::quiet_NaN();
    }

    const Index available = spec.rank() - 1;
    for (Index d : cfg.d_grid) {
        if (d > available) continue;
        const Matrix enc = spec.top_left(d);
        const Matrix down = apply_neighbors(sh.down_nbrs, enc);
        const Matrix test = apply_neighbors(sh.test_nbrs, enc);
        double mse = 0.0;
        for (Index t = 0; t < prep.downstream_targets.cols(); ++t) {
            const ProbeResult probe =
                fit_linear_probe(down, prep.downstream_targets.col(t), test, prep.test_targets.col(t), cfg.ridge_grid,
                                 mix_seed(stream_seed, static_cast<std::uint64_t>(d)));
            mse += probe.test_mse;
        }
        r.err_curve.push_back({d, mse / static_cast<double>(prep.downstream_targets.cols())});
    }
    if (r.err_curve.empty()) throw InvalidArgument("context has rank " + std::to_string(available) + ", below every d in d_grid");
    const auto best = std::min_element(r.err_curve.begin(), r.err_curve.end(),
                                       [](const ProbeError& a, const ProbeError& b) { return a.test_mse < b.test_mse; });
    r.err_d_star = best->test_mse;
    r.d_star = best->d;
    r.ok = true;
    return r;
}

} // namespace

void ExperimentConfig::validate() const {
    double total = 0.0;
    for (double f : split_fractions) {
        if (!(f > 0.0)) throw InvalidArgument("split_fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("split_fractions must sum to 1");
    if (context_grid.empty()) throw InvalidArgument("context grid is empty");
    if (d_grid.empty()) throw InvalidArgument("d_grid is empty");
    if (ridge_grid.empty()) throw InvalidArgument("ridge_grid is empty");
    if (d0 < 1) throw InvalidArgument("d0 must be at least 1");
    if (!(beta > 0.0)) throw InvalidArgument("beta must be positive");
    for (Index d : d_grid)
        if (d < 1) throw InvalidArgument("d_grid entries must be at least 1");
    for (double l : ridge_grid)
        if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("ridge_grid entries must be finite and nonnegative");
    if (threads < 1) throw InvalidArgument("threads must be at least 1");
    for (const auto& c : context_grid)
        if (c != "default") ContextDescriptor::parse(c);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& base_dir) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidArgument("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "dataset" || key == "dataset_path") {
            namespace fs = std::filesystem;
            fs::path p(value);
            if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
            cfg.dataset_path = p.lexically_normal().string();
        } else if (key == "target" || key == "target_column") {
            cfg.target_column = value;
        } else if (key == "split_fractions") {
            const auto parts = split_list(value);
            if (parts.size() != 3) throw InvalidArgument("split_fractions needs three values");
            for (std::size_t i = 0; i < 3; ++i) cfg.split_fractions[i] = to_double(key, parts[i]);
        } else if (key == "contexts" || key == "context_grid") {
            cfg.context_grid = split_list(value);
        } else if (key == "d0") {
            cfg.d0 = to_integer<Index>(key, value);
        } else if (key == "beta") {
            cfg.beta = to_double(key, value);
        } else if (key == "ridge_grid") {
            cfg.ridge_grid.clear();
            for (const auto& v : split_list(value)) cfg.ridge_grid.push_back(to_double(key, v));
        } else if (key == "d_grid") {
            cfg.d_grid.clear();
            for (const auto& v : split_list(value)) cfg.d_grid.push_back(to_integer<Index>(key, v));
        } else if (key == "seed") {
            cfg.seed = to_integer<std::uint64_t>(key, value);
        } else if (key == "threads") {
            cfg.threads = to_integer<unsigned>(key, value);
        } else {
            throw InvalidArgument("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (cfg.dataset_path.empty()) throw InvalidArgument("config is missing 'dataset'");
    if (cfg.target_column.empty()) throw InvalidArgument("config is missing 'target'");
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<ContextDescriptor> default_context_grid(Index n_pretrain, Index n_features) {
    if (n_features < 1) throw InvalidArgument("default_context_grid: need at least one feature");
    std::vector<ContextDescriptor> grid;
    for (int i = 0; i < 35; ++i) {
        ContextDescriptor d;
        d.kind = ContextDescriptor::Kind::rbf;
        d.gamma = std::pow(10.0, -3.0 + 4.0 * i / 34.0) / static_cast<double>(n_features);
        grid.push_back(d);
    }
    const Index k_max = std::max<Index>(1, std::min(n_pretrain / 2, n_pretrain - 1));
    std::set<Index> seen;
    for (int i = 0; i < 35; ++i) {
        const double t = i / 34.0;
        const auto k = static_cast<Index>(std::llround(std::pow(static_cast<double>(k_max), t)));
        if (!seen.insert(k).second) continue;
        ContextDescriptor d;
        d.kind = ContextDescriptor::Kind::knn;
        d.k = k;
        grid.push_back(d);
    }
    return grid;
}

Matrix extend_encoder(const Matrix& reference, const Matrix& values, const Matrix& rows, Index k) {
    if (values.rows() != reference.rows()) throw InvalidArgument("extend_encoder: values and reference row counts differ");
    return apply_neighbors(neighbor_lists(reference, rows, k), values);
}

PreparedData prepare_data(const LoadedDataset& data, const ExperimentConfig& config) {
    const Index n = data.points.size();
    if (data.targets.size() != n) throw InvalidArgument("prepare_data: dataset has no target column");
    PreparedData prep;
    prep.splits = split_dataset(n, config.split_fractions, config.seed);
    const Matrix& x = data.points.points;
    const Matrix pre = x(prep.splits[0], Eigen::all);
    const Standardizer z = Standardizer::fit(pre);
    prep.pretrain = z.apply(pre);
    prep.downstream = z.apply(x(prep.splits[1], Eigen::all));
    prep.test = z.apply(x(prep.splits[2], Eigen::all));

    Matrix y;
    if (data.categorical) {
        const auto c = static_cast<Index>(data.class_names.size());
        if (c < 2) throw InvalidArgument("categorical target has a single class");
        if (c == 2) {
            y = data.targets;
        } else {
            y = Matrix::Zero(n, c);
            for (Index i = 0; i < n; ++i) y(i, static_cast<Index>(data.targets(i))) = 1.0;
        }
    } else {
        y = data.targets;
    }
    Matrix yd = y(prep.splits[1], Eigen::all);
    Matrix yt = y(prep.splits[2], Eigen::all);
    for (Index j = 0; j < y.cols(); ++j) {
        const double mean = yd.col(j).mean();
        const double sd = std::sqrt((yd.col(j).array() - mean).square().mean());
        const double scale = sd > 0.0 ? 1.0 / sd : 1.0;
        yd.col(j) = (yd.col(j).array() - mean) * scale;
        yt.col(j) = (yt.col(j).array() - mean) * scale;
    }
    prep.downstream_targets = std::move(yd);
    prep.test_targets = std::move(yt);
    return prep;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    const LoadedDataset data = load_dataset(config.dataset_path, config.target_column);
    return run_experiment(config, data);
}

ExperimentReport run_experiment(const ExperimentConfig& config, const LoadedDataset& data) {
    config.validate();
    const PreparedData prep = prepare_data(data, config);

    ExperimentReport report;
    report.dataset = config.dataset_path;
    report.target = data.target_name.empty() ? config.target_column : data.target_name;
    report.seed = config.seed;
    report.d0 = config.d0;
    report.beta = config.beta;
    for (std::size_t i = 0; i < 3; ++i) report.split_sizes[i] = static_cast<Index>(prep.splits[i].size());

    std::vector<std::string> names;
    std::vector<std::optional<ContextDescriptor>> descs;
    std::vector<std::string> parse_errors;
    for (const auto& entry : config.context_grid) {
        if (entry == "default") {
            for (const auto& d : default_context_grid(prep.pretrain.rows(), prep.pretrain.cols())) {
                names.push_back(d.to_string());
                descs.emplace_back(d);
                parse_errors.emplace_back();
            }
            continue;
        }
        names.push_back(entry);
        try {
            descs.emplace_back(ContextDescriptor::parse(entry));
            parse_errors.emplace_back();
        } catch (const Error& e) {
            descs.emplace_back(std::nullopt);
            parse_errors.emplace_back(e.what());
        }
    }

    const Shared shared{config, data, prep, neighbor_lists(prep.pretrain, prep.downstream, 5),
                        neighbor_lists(prep.pretrain, prep.test, 5)};
    std::vector<ContextResult> results(names.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next.fetch_add(1); i < names.size(); i = next.fetch_add(1)) {
            ContextResult& r = results[i];
            if (!descs[i]) {
                r.descriptor = names[i];
                r.error = parse_errors[i];
                continue;
            }
            try {
                r = run_context(shared, *descs[i], mix_seed(config.seed, static_cast<std::uint64_t>(i)));
            } catch (const std::exception& e) {
                r = ContextResult{};
                r.descriptor = descs[i]->to_string();
                r.error = e.what();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(names.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    report.per_context = std::move(results);

    std::vector<double> taus, errs;
    Index n_ok = 0, n_infinite = 0;
    for (const auto& r : report.per_context) {
        if (!r.ok) continue;
        ++n_ok;
        if (!std::isfinite(r.tau) || !std::isfinite(r.err_d_star)) {
            ++n_infinite;
            continue;
        }
        taus.push_back(r.tau);
        errs.push_back(r.err_d_star);
    }
    report.n_ok = n_ok;
    const std::string excluded =
        n_infinite > 0 ? std::to_string(n_infinite) + " contexts with non-finite tau left out of the correlations" : "";
    if (taus.size() < 3) {
        report.summary_note = "fewer than 3 contexts with finite tau; correlations undefined";
    } else {
        report.summary_note = excluded;
        try {
            const CorrelationStats cs =
                correlation_stats(Eigen::Map<const Vector>(taus.data(), static_cast<Index>(taus.size())),
                                  Eigen::Map<const Vector>(errs.data(), static_cast<Index>(errs.size())));
            report.pearson = cs.pearson;
            report.distance_corr = cs.distance_corr;
        } catch (const Error& e) {
            report.summary_note = e.what();
        }
    }
    return report;
}

} // namespace contexture
