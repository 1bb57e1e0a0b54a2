#ifndef CONTEXTURE_EXPERIMENT_HPP
#define CONTEXTURE_EXPERIMENT_HPP

#include "contexture/context.hpp"
#include "contexture/dataset.hpp"
#include "contexture/evaluation.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace contexture {

struct ExperimentConfig {
    std::string dataset_path;
    std::string target_column;
    std::array<double, 3> split_fractions{0.7, 0.15, 0.15};  // pretrain, downstream, test
    /// Descriptor strings; the single entry "default" expands to
    /// default_context_grid at run time.
    std::vector<std::string> context_grid{"default"};
    Index d0 = 32;
    double beta = 1.0;
    std::vector<double> ridge_grid{1e-6, 1e-4, 1e-2, 1e-1, 1.0, 10.0};
    std::vector<Index> d_grid{1, 2, 4, 8, 16, 32};
    std::uint64_t seed = 0;
    unsigned threads = 1;

    /// Throws InvalidArgument: fractions positive and summing to 1 within
    /// 1e-9, nonempty grids, positive d0 / beta / d values, nonnegative ridge
    /// penalties.
    void validate() const;

    /// Flat key = value text; `[section]` headers and `#` / `;` comments are
    /// ignored. Lists are comma separated. Keys: dataset, target,
    /// split_fractions, contexts, d0, beta, ridge_grid, d_grid, seed, threads.
    /// A relative dataset path resolves against the config file's directory.
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text, const std::string& base_dir = "");
};

/// 35 RBF widths gamma_i = 10^(-3 + 4 i / 34) / p, i = 0..34 (p = feature
/// count), followed by up to 35 KNN sizes log-spaced over [1, n_pretrain / 2],
/// rounded and deduplicated.
std::vector<ContextDescriptor> default_context_grid(Index n_pretrain, Index n_features);

/// Out-of-support extension: each new row gets the mean of `values` over its
/// k nearest rows of `reference` (Euclidean, ties to the lower index). A row
/// that coincides with a reference row takes that row's value exactly.
Matrix extend_encoder(const Matrix& reference, const Matrix& values, const Matrix& rows, Index k = 5);

inline constexpr const char* kExtensionRule =
    "downstream and test embeddings are the mean of the pretrain eigenfunction values over the 5 nearest "
    "pretrain rows (KNN(5) context between new rows and the pretrain split); an exact pretrain match takes "
    "that row's value";

/// Dataset after splitting and preprocessing: features z-scored with pretrain
/// statistics; probe targets standardized with downstream statistics, one
/// column per class (one-hot) for categorical targets with more than two
/// classes, a single 0/1 column for two classes.
struct PreparedData {
    std::array<std::vector<Index>, 3> splits;
    Matrix pretrain;
    Matrix downstream;
    Matrix test;
    Matrix downstream_targets;
    Matrix test_targets;
};

PreparedData prepare_data(const LoadedDataset& data, const ExperimentConfig& config);

struct ContextResult {
    std::string descriptor;
    bool ok = false;
    std::string error;
    Vector tau_curve;
    double tau = 0.0;
    Index d_star_metric = 0;
    bool degenerate = false;
    double decay_rate = std::numeric_limits<double>::quiet_NaN();
    std::vector<ProbeError> err_curve;  // err_d over the usable part of d_grid
    double err_d_star = 0.0;            // min over err_curve
    Index d_star = 0;
};

struct ExperimentReport {
    std::string dataset;
    std::string target;
    std::uint64_t seed = 0;
    std::array<Index, 3> split_sizes{0, 0, 0};
    Index d0 = 0;
    double beta = 0.0;
    std::vector<ContextResult> per_context;
    /// Over successful contexts; NaN with a note when fewer than 3 succeed or
    /// either series is constant.
    double pearson = std::numeric_limits<double>::quiet_NaN();
    double distance_corr = std::numeric_limits<double>::quiet_NaN();
    Index n_ok = 0;
    std::string summary_note;
    std::string extension_rule = kExtensionRule;
};

/// Loads config.dataset_path and runs the sweep.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Sweep over an in-memory dataset. Each context i draws randomness from
/// mix_seed(config.seed, i), so results do not depend on `threads`.
ExperimentReport run_experiment(const ExperimentConfig& config, const LoadedDataset& data);

} // namespace contexture

#endif // CONTEXTURE_EXPERIMENT_HPP
