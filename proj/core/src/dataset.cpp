#include "contexture/dataset.hpp"

#include "contexture/error.hpp"
#include "contexture/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>

namespace contexture {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    for (auto& c : cells) {
        const auto b = c.find_first_not_of(" \t");
        const auto e = c.find_last_not_of(" \t");
        c = b == std::string::npos ? std::string() : c.substr(b, e - b + 1);
    }
    return cells;
}

std::optional<double> parse_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* begin = s.data();
    if (*begin == '+') ++begin;
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open dataset '" + path + "'");
    RawTable t;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (!have_header) {
            t.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                                  " cells, found " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    if (!have_header) throw InvalidArgument("dataset '" + path + "' has no header row");
    return t;
}

LoadedDataset assemble(const std::string& path, const RawTable& t, const std::string& target_column, bool need_target,
                       std::size_t min_rows) {
    if (t.rows.size() < min_rows)
        throw InvalidArgument("dataset '" + path + "' has " + std::to_string(t.rows.size()) + " rows; need at least " +
                              std::to_string(min_rows));
    std::optional<std::size_t> target_idx;
    if (!target_column.empty()) {
        auto it = std::find(t.header.begin(), t.header.end(), target_column);
        if (it == t.header.end()) throw InvalidArgument("dataset '" + path + "' has no column '" + target_column + "'");
        target_idx = static_cast<std::size_t>(it - t.header.begin());
    } else if (need_target) {
        throw InvalidArgument("a target column is required");
    }

    LoadedDataset ds;
    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        if (target_idx && j == *target_idx) continue;
        feature_cols.push_back(j);
        ds.feature_names.push_back(t.header[j]);
    }
    if (feature_cols.empty()) throw InvalidArgument("dataset '" + path + "' has no feature columns");

    const auto n = static_cast<Index>(t.rows.size());
    Matrix x(n, static_cast<Index>(feature_cols.size()));
    for (Index i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < feature_cols.size(); ++c) {
            const std::string& cell = t.rows[static_cast<std::size_t>(i)][feature_cols[c]];
            const auto v = parse_number(cell);
            if (!v)
                throw InvalidArgument("dataset '" + path + "' row " + std::to_string(i + 1) + ", column '" +
                                      t.header[feature_cols[c]] + "': non-numeric value '" + cell + "'");
            x(i, static_cast<Index>(c)) = *v;
        }
    }
    ds.points.points = std::move(x);

    if (target_idx) {
        ds.target_name = target_column;
        ds.targets.resize(n);
        bool numeric = true;
        for (const auto& row : t.rows) numeric = numeric && parse_number(row[*target_idx]).has_value();
        if (numeric) {
            for (Index i = 0; i < n; ++i) ds.targets(i) = *parse_number(t.rows[static_cast<std::size_t>(i)][*target_idx]);
        } else {
            ds.categorical = true;
            std::map<std::string, int> codes;
            for (const auto& row : t.rows) codes.emplace(row[*target_idx], 0);
            int next = 0;
            for (auto& [name, code] : codes) {
                code = next++;
                ds.class_names.push_back(name);
            }
            for (Index i = 0; i < n; ++i) ds.targets(i) = codes.at(t.rows[static_cast<std::size_t>(i)][*target_idx]);
        }
        ds.points.labels = ds.targets;
    }
    return ds;
}

} // namespace

LoadedDataset load_dataset(const std::string& path, const std::string& target_column) {
    return assemble(path, read_table(path), target_column, true, 10);
}

LoadedDataset load_features(const std::string& path, const std::string& target_column) {
    return assemble(path, read_table(path), target_column, false, 2);
}

Standardizer Standardizer::fit(const Matrix& rows) {
    if (rows.rows() < 1) throw InvalidArgument("Standardizer: no rows");
    Standardizer s;
    s.mean = rows.colwise().mean();
    s.scale.resize(rows.cols());
    for (Index j = 0; j < rows.cols(); ++j) {
        const double var = (rows.col(j).array() - s.mean(j)).square().mean();
        s.scale(j) = var > 1e-24 * std::max(1.0, s.mean(j) * s.mean(j)) ? 1.0 / std::sqrt(var) : 0.0;
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& rows) const {
    if (rows.cols() != mean.size()) throw InvalidArgument("Standardizer: column count mismatch");
    return (rows.rowwise() - mean.transpose()) * scale.asDiagonal();
}

std::array<std::vector<Index>, 3> split_dataset(Index n, const std::array<double, 3>& fractions, std::uint64_t seed) {
    double total = 0.0;
    for (double f : fractions) {
        if (!(f > 0.0)) throw InvalidArgument("split_dataset: fractions must be positive");
        total += f;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("split_dataset: fractions must sum to 1");
    const auto nd = static_cast<double>(n);
    const auto a = static_cast<Index>(std::floor(fractions[0] * nd + 1e-9));
    const auto b = static_cast<Index>(std::floor(fractions[1] * nd + 1e-9));
    const Index c = n - a - b;
    if (a < 1 || b < 1 || c < 1)
        throw InvalidArgument("split_dataset: n = " + std::to_string(n) + " leaves an empty split (" + std::to_string(a) +
                              ", " + std::to_string(b) + ", " + std::to_string(c) + ")");
    Rng rng(seed);
    const auto perm = rng.permutation(static_cast<std::size_t>(n));
    std::array<std::vector<Index>, 3> out;
    for (Index i = 0; i < n; ++i) {
        const auto idx = static_cast<Index>(perm[static_cast<std::size_t>(i)]);
        out[i < a ? 0 : (i < a + b ? 1 : 2)].push_back(idx);
    }
    return out;
}

} // namespace contexture
