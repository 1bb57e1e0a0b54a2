#include "contexture/context.hpp"

#include "contexture/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace contexture {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

double parse_real(const std::string& s, const std::string& what) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw InvalidArgument("context descriptor: bad " + what + " '" + s + "'");
    return v;
}

Index parse_count(const std::string& s, const std::string& what) {
    long long v = 0;
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || v < 1)
        throw InvalidArgument("context descriptor: bad " + what + " '" + s + "'");
    return static_cast<Index>(v);
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

} // namespace

ContextDescriptor ContextDescriptor::parse(const std::string& text) {
    ContextDescriptor d;
    if (text == "label") {
        d.kind = Kind::label;
        return d;
    }
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("context descriptor: unrecognized '" + text + "'");
    const std::string head = text.substr(0, colon);
    if (head == "graph") {
        d.kind = Kind::graph;
        d.path = text.substr(colon + 1);
        if (d.path.empty()) throw InvalidArgument("context descriptor: graph needs a path");
        return d;
    }
    const auto parts = split(text, ':');
    if (head == "knn" && parts.size() == 2) {
        d.kind = Kind::knn;
        d.k = parse_count(parts[1], "K");
    } else if (head == "rbf" && parts.size() == 2) {
        d.kind = Kind::rbf;
        d.gamma = parse_real(parts[1], "GAMMA");
        if (!(d.gamma > 0.0)) throw InvalidArgument("context descriptor: GAMMA must be positive");
    } else if ((head == "knn+mask" || head == "rbf+mask") && parts.size() == 4) {
        if (head == "knn+mask") {
            d.kind = Kind::knn_mask;
            d.k = parse_count(parts[1], "K");
        } else {
            d.kind = Kind::rbf_mask;
            d.gamma = parse_real(parts[1], "GAMMA");
            if (!(d.gamma > 0.0)) throw InvalidArgument("context descriptor: GAMMA must be positive");
        }
        d.mask_fraction = parse_real(parts[2], "FRAC");
        if (!(d.mask_fraction >= 0.0 && d.mask_fraction < 1.0))
            throw InvalidArgument("context descriptor: FRAC must lie in [0, 1)");
        d.n_masks = parse_count(parts[3], "NMASKS");
    } else {
        throw InvalidArgument("context descriptor: unrecognized '" + text + "'");
    }
    return d;
}

std::string ContextDescriptor::to_string() const {
    switch (kind) {
    case Kind::knn: return "knn:" + std::to_string(k);
    case Kind::rbf: return "rbf:" + format_real(gamma);
    case Kind::knn_mask:
        return "knn+mask:" + std::to_string(k) + ":" + format_real(mask_fraction) + ":" + std::to_string(n_masks);
    case Kind::rbf_mask:
        return "rbf+mask:" + format_real(gamma) + ":" + format_real(mask_fraction) + ":" + std::to_string(n_masks);
    case Kind::label: return "label";
    case Kind::graph: return "graph:" + path;
    }
    return {};
}

Matrix read_adjacency_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open adjacency file '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        for (auto cell : split(line, ',')) {
            const auto b = cell.find_first_not_of(" \t");
            const auto e = cell.find_last_not_of(" \t");
            cell = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
            row.push_back(parse_real(cell, "adjacency entry in '" + path + "'"));
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Index>(rows.size());
    Matrix a(n, n);
    for (Index i = 0; i < n; ++i) {
        if (static_cast<Index>(rows[i].size()) != n)
            throw InvalidArgument("adjacency file '" + path + "' is not square");
        for (Index j = 0; j < n; ++j) a(i, j) = rows[i][j];
    }
    return a;
}

FiniteContext build_context(const ContextDescriptor& descriptor, const PointSet& points,
                            const DiscreteDistribution& marginal, std::uint64_t seed) {
    using Kind = ContextDescriptor::Kind;
    switch (descriptor.kind) {
    case Kind::knn: return build_knn_context(points, descriptor.k, marginal);
    case Kind::rbf: return build_rbf_context(points, descriptor.gamma, marginal);
    case Kind::knn_mask:
    case Kind::rbf_mask: {
        BaseBuilder base;
        base.kind = descriptor.kind == Kind::knn_mask ? BaseBuilder::Kind::knn : BaseBuilder::Kind::rbf;
        base.k = descriptor.k;
        base.gamma = descriptor.gamma;
        return build_masked_context(points, base, descriptor.mask_fraction, descriptor.n_masks, seed, marginal);
    }
    case Kind::label: {
        if (!points.labels) throw InvalidArgument("label context needs labels");
        std::vector<int> labels(static_cast<std::size_t>(points.size()));
        for (Index i = 0; i < points.size(); ++i) {
            const double v = (*points.labels)(i);
            if (v != std::round(v) || v < 0.0) throw InvalidArgument("label context needs non-negative integer labels");
            labels[static_cast<std::size_t>(i)] = static_cast<int>(v);
        }
        return build_label_context(labels, marginal);
    }
    case Kind::graph: {
        FiniteContext g = build_graph_context(read_adjacency_csv(descriptor.path));
        return FiniteContext(g.conditional(), g.input_marginal(), descriptor.to_string(), true);
    }
    }
    throw InvalidArgument("unknown context kind");
}

} // namespace contexture
