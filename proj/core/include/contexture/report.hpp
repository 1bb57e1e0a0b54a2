#ifndef CONTEXTURE_REPORT_HPP
#define CONTEXTURE_REPORT_HPP

#include "contexture/experiment.hpp"
#include "contexture/serialization.hpp"
#include "contexture/verify.hpp"

#include <string>

namespace contexture {

enum class ReportFormat { json, csv };

ReportFormat parse_report_format(const std::string& name);

Json experiment_report_to_json(const ExperimentReport& report);
ExperimentReport experiment_report_from_json(const Json& j);

/// One row per context: descriptor, ok, tau, d_star_metric, err_d_star,
/// d_star, decay_rate, then err_d for every d in the union of curves, error.
std::string experiment_report_csv(const ExperimentReport& report);

Json verify_report_to_json(const VerifyReport& report);
VerifyReport verify_report_from_json(const Json& j);

/// name, passed, max_residual, tolerance, evaluations, detail.
std::string verify_report_csv(const VerifyReport& report);

/// Atomic write (temporary file + rename); IoError carries the path.
void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format);
void write_report(const VerifyReport& report, const std::string& path, ReportFormat format);

std::string render_report(const ExperimentReport& report, ReportFormat format);
std::string render_report(const VerifyReport& report, ReportFormat format);

} // namespace contexture

#endif // CONTEXTURE_REPORT_HPP
