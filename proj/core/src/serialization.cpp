#include "contexture/serialization.hpp"

#include "contexture/error.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace contexture {

namespace {

std::atomic<std::uint64_t> temp_counter{0};

double json_number(const Json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

Json json_number_value(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

std::vector<std::string> split_cells(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    std::stringstream ss(line);
    while (std::getline(ss, cur, ',')) cells.push_back(cur);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

} // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
    fs::path temp = target;
    temp += ".tmp." + std::to_string(tid) + "." + std::to_string(temp_counter.fetch_add(1));
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + temp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(temp, ec);
            throw IoError("write to '" + temp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(temp, ignored);
        throw IoError("cannot move output into '" + path + "': " + ec.message());
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read from '" + path + "' failed");
    return ss.str();
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_file(const std::string& path) {
    const std::string text = read_text(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InvalidArgument("'" + path + "' is not valid JSON: " + e.what());
    }
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(json_number_value(v(i)));
    return out;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw InvalidArgument("expected a JSON array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = json_number(j[i]);
    return v;
}

Json matrix_to_json(const Matrix& m) {
    Json out = Json::array();
    for (Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
    return out;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw InvalidArgument("expected a JSON array of rows");
    if (j.empty()) return Matrix(0, 0);
    const auto cols = j[0].size();
    Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw InvalidArgument("matrix rows have unequal lengths");
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = json_number(j[r][c]);
    }
    return m;
}

Json spectrum_to_json(const ContextureSpectrum& spec, std::optional<Index> subsample_m) {
    Json j;
    j["singular_values"] = vector_to_json(spec.singular_values);
    j["clamped"] = spec.clamped;
    j["p_x"] = vector_to_json(spec.input_marginal.weights());
    j["p_a"] = vector_to_json(spec.context_marginal.weights());
    j["left"] = matrix_to_json(spec.left);
    j["right"] = matrix_to_json(spec.right);
    j["rank"] = spec.rank();
    if (subsample_m) {
        j["estimated"] = true;
        j["m"] = *subsample_m;
    }
    return j;
}

ContextureSpectrum spectrum_from_json(const Json& j) {
    try {
        ContextureSpectrum spec;
        spec.singular_values = vector_from_json(j.at("singular_values"));
        spec.clamped = j.at("clamped").get<std::vector<bool>>();
        spec.input_marginal = DiscreteDistribution(vector_from_json(j.at("p_x")));
        spec.context_marginal = DiscreteDistribution(vector_from_json(j.at("p_a")));
        spec.left = matrix_from_json(j.at("left"));
        spec.right = matrix_from_json(j.at("right"));
        const Index r = spec.singular_values.size();
        if (r < 1 || static_cast<Index>(spec.clamped.size()) != r || spec.left.cols() != r || spec.right.cols() != r ||
            spec.left.rows() != spec.input_marginal.size() || spec.right.rows() != spec.context_marginal.size())
            throw InvalidArgument("spectrum JSON has inconsistent shapes");
        return spec;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed spectrum JSON: ") + e.what());
    }
}

Json usefulness_to_json(const UsefulnessReport& r) {
    Json j;
    j["tau_curve"] = vector_to_json(r.tau_curve);
    j["tau"] = json_number_value(r.tau);
    j["d_star_metric"] = r.d_star_metric;
    j["decay_rate"] = json_number_value(r.decay_rate);
    j["beta"] = r.beta;
    j["d0"] = r.d0;
    j["kernel_deviation"] = json_number_value(r.kernel_deviation);
    j["lipschitz"] = json_number_value(r.lipschitz);
    j["degenerate"] = r.degenerate;
    Json errs = Json::array();
    for (const auto& e : r.probe_errors) errs.push_back({{"d", e.d}, {"test_mse", json_number_value(e.test_mse)}});
    j["probe_errors"] = errs;
    return j;
}

UsefulnessReport usefulness_from_json(const Json& j) {
    try {
        UsefulnessReport r;
        r.tau_curve = vector_from_json(j.at("tau_curve"));
        r.tau = json_number(j.at("tau"));
        r.d_star_metric = j.at("d_star_metric").get<Index>();
        r.decay_rate = json_number(j.at("decay_rate"));
        r.beta = j.at("beta").get<double>();
        r.d0 = j.at("d0").get<Index>();
        r.kernel_deviation = json_number(j.value("kernel_deviation", Json()));
        r.lipschitz = json_number(j.value("lipschitz", Json()));
        r.degenerate = j.at("degenerate").get<bool>();
        for (const auto& e : j.value("probe_errors", Json::array()))
            r.probe_errors.push_back({e.at("d").get<Index>(), json_number(e.at("test_mse"))});
        return r;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed usefulness JSON: ") + e.what());
    }
}

Json probe_to_json(const ProbeResult& p) {
    Json j;
    j["weights"] = vector_to_json(p.weights);
    j["bias"] = json_number_value(p.bias);
    j["ridge_penalty"] = p.ridge_penalty;
    j["train_mse"] = json_number_value(p.train_mse);
    j["test_mse"] = json_number_value(p.test_mse);
    return j;
}

std::string tau_curve_csv(const UsefulnessReport& r) {
    std::string out = "d,tau_d\n";
    for (Index i = 0; i < r.tau_curve.size(); ++i) out += std::to_string(i + 1) + "," + format_double(r.tau_curve(i)) + "\n";
    return out;
}

std::string encoder_csv(const Matrix& values) {
    std::string out;
    for (Index c = 0; c < values.cols(); ++c) out += (c ? ",phi_" : "phi_") + std::to_string(c + 1);
    out += "\n";
    for (Index r = 0; r < values.rows(); ++r) {
        for (Index c = 0; c < values.cols(); ++c) {
            if (c) out += ",";
            out += format_double(values(r, c));
        }
        out += "\n";
    }
    return out;
}

Matrix read_matrix_csv(const std::string& path) {
    std::istringstream in(read_text(path));
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t cols = 0;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_cells(line);
        if (header) {
            cols = cells.size();
            header = false;
            continue;
        }
        if (cells.size() != cols)
            throw InvalidArgument(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(cols) + " cells");
        std::vector<double> row;
        for (const auto& cell : cells) {
            double v = 0.0;
            const char* b = cell.data();
            const char* e = b + cell.size();
            auto [ptr, ec] = std::from_chars(b, e, v);
            if (ec != std::errc() || ptr != e)
                throw InvalidArgument(path + ":" + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (header) throw InvalidArgument("'" + path + "' has no header row");
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return m;
}

} // namespace contexture
