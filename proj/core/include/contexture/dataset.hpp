#ifndef CONTEXTURE_DATASET_HPP
#define CONTEXTURE_DATASET_HPP

#include "contexture/context.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace contexture {

/// Tabular dataset with numeric features and one target column. Features are
/// raw; standardize them with pretrain-split statistics after splitting.
struct LoadedDataset {
    std::vector<std::string> feature_names;
    std::string target_name;
    PointSet points;  // labels hold the (integer-coded) targets
    Vector targets;
    bool categorical = false;
    std::vector<std::string> class_names;  // sorted; code i is class_names[i]
};

/// Reads a CSV with a header row. A target column containing any non-numeric
/// cell is categorical and coded by the sorted distinct values. Throws
/// InvalidArgument for a missing column, a non-numeric feature cell, or fewer
/// than 10 rows; IoError when the file cannot be read.
LoadedDataset load_dataset(const std::string& path, const std::string& target_column);

/// Same as load_dataset but keeps every column as a feature (no target).
LoadedDataset load_features(const std::string& path, const std::string& target_column = "");

/// Per-column z-scoring. Zero-variance columns map to 0.
struct Standardizer {
    Vector mean;
    Vector scale;  // 1 / std, or 0 for constant columns

    static Standardizer fit(const Matrix& rows);
    Matrix apply(const Matrix& rows) const;
};

/// Seeded permutation cut into contiguous slices of floor(f0 n), floor(f1 n)
/// and the remainder.
std::array<std::vector<Index>, 3> split_dataset(Index n, const std::array<double, 3>& fractions, std::uint64_t seed);

} // namespace contexture

#endif // CONTEXTURE_DATASET_HPP
