#ifndef CONTEXTURE_SERIALIZATION_HPP
#define CONTEXTURE_SERIALIZATION_HPP

#include "contexture/evaluation.hpp"
#include "contexture/spectral.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>

namespace contexture {

using Json = nlohmann::json;

/// Writes `content` to a temporary file next to `path`, then renames it over
/// `path`. Throws IoError naming the path on failure.
void write_text_atomic(const std::string& path, const std::string& content);

/// Whole-file read. Throws IoError naming the path on failure.
std::string read_text(const std::string& path);

/// Deterministic serialization: sorted keys, two-space indent, trailing newline.
std::string dump_json(const Json& j);

Json parse_json_file(const std::string& path);

/// Spectrum as {"singular_values", "clamped", "rank", "p_x", "p_a", "left",
/// "right"} with matrices stored as arrays of rows.
/// Estimated spectra carry "estimated": true and the subsample size "m".
Json spectrum_to_json(const ContextureSpectrum& spec, std::optional<Index> subsample_m = std::nullopt);
ContextureSpectrum spectrum_from_json(const Json& j);

Json usefulness_to_json(const UsefulnessReport& report);
UsefulnessReport usefulness_from_json(const Json& j);

Json probe_to_json(const ProbeResult& result);

/// "d,tau_d" rows for d = 1..d0.
std::string tau_curve_csv(const UsefulnessReport& report);

/// Header phi_1..phi_d, one row per support point.
std::string encoder_csv(const Matrix& values);

/// Reads a numeric CSV with a header row into a matrix.
Matrix read_matrix_csv(const std::string& path);

/// Matrix columns as nested row arrays, and back.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Shortest round-trip decimal text of a double ("nan", "inf", "-inf" for
/// non-finite values).
std::string format_double(double v);

} // namespace contexture

#endif // CONTEXTURE_SERIALIZATION_HPP
