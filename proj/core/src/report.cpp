#include "contexture/report.hpp"

#include "contexture/error.hpp"

#include <cmath>
#include <set>

namespace contexture {

namespace {

Json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

double number_from(const Json& v) {
    if (v.is_null()) return std::numeric_limits<double>::quiet_NaN();
    return v.get<double>();
}

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string csv_number(double v) { return std::isfinite(v) ? format_double(v) : ""; }

} // namespace

ReportFormat parse_report_format(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    throw InvalidArgument("unknown report format '" + name + "' (expected json or csv)");
}

Json experiment_report_to_json(const ExperimentReport& r) {
    Json j;
    j["dataset"] = r.dataset;
    j["target"] = r.target;
    j["seed"] = r.seed;
    j["split_sizes"] = {r.split_sizes[0], r.split_sizes[1], r.split_sizes[2]};
    j["d0"] = r.d0;
    j["beta"] = r.beta;
    j["extension_rule"] = r.extension_rule;
    Json rows = Json::array();
    for (const auto& c : r.per_context) {
        Json row;
        row["descriptor"] = c.descriptor;
        row["ok"] = c.ok;
        row["error"] = c.error;
        row["tau_curve"] = vector_to_json(c.tau_curve);
        row["tau"] = c.ok ? number(c.tau) : Json(nullptr);
        row["d_star_metric"] = c.d_star_metric;
        row["degenerate"] = c.degenerate;
        row["decay_rate"] = number(c.decay_rate);
        Json curve = Json::array();
        for (const auto& e : c.err_curve) curve.push_back({{"d", e.d}, {"err", number(e.test_mse)}});
        row["err_d"] = curve;
        row["err_d_star"] = c.ok ? number(c.err_d_star) : Json(nullptr);
        row["d_star"] = c.d_star;
        rows.push_back(row);
    }
    j["per_context"] = rows;
    j["summary"] = {{"pearson", number(r.pearson)},
                    {"distance_corr", number(r.distance_corr)},
                    {"n_ok", r.n_ok},
                    {"n_contexts", r.per_context.size()},
                    {"note", r.summary_note}};
    return j;
}

ExperimentReport experiment_report_from_json(const Json& j) {
    try {
        ExperimentReport r;
        r.dataset = j.at("dataset").get<std::string>();
        r.target = j.at("target").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (std::size_t i = 0; i < 3; ++i) r.split_sizes[i] = j.at("split_sizes").at(i).get<Index>();
        r.d0 = j.at("d0").get<Index>();
        r.beta = j.at("beta").get<double>();
        r.extension_rule = j.at("extension_rule").get<std::string>();
        for (const auto& row : j.at("per_context")) {
            ContextResult c;
            c.descriptor = row.at("descriptor").get<std::string>();
            c.ok = row.at("ok").get<bool>();
            c.error = row.at("error").get<std::string>();
            c.tau_curve = vector_from_json(row.at("tau_curve"));
            c.tau = row.at("tau").is_null() ? 0.0 : row.at("tau").get<double>();
            c.d_star_metric = row.at("d_star_metric").get<Index>();
            c.degenerate = row.at("degenerate").get<bool>();
            c.decay_rate = number_from(row.at("decay_rate"));
            for (const auto& e : row.at("err_d")) c.err_curve.push_back({e.at("d").get<Index>(), number_from(e.at("err"))});
            c.err_d_star = row.at("err_d_star").is_null() ? 0.0 : row.at("err_d_star").get<double>();
            c.d_star = row.at("d_star").get<Index>();
            r.per_context.push_back(std::move(c));
        }
        const Json& s = j.at("summary");
        r.pearson = number_from(s.at("pearson"));
        r.distance_corr = number_from(s.at("distance_corr"));
        r.n_ok = s.at("n_ok").get<Index>();
        r.summary_note = s.at("note").get<std::string>();
        return r;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed experiment report: ") + e.what());
    }
}

std::string experiment_report_csv(const ExperimentReport& r) {
    std::set<Index> ds;
    for (const auto& c : r.per_context)
        for (const auto& e : c.err_curve) ds.insert(e.d);
    std::string out = "descriptor,ok,tau,d_star_metric,err_d_star,d_star,decay_rate";
    for (Index d : ds) out += ",err_" + std::to_string(d);
    out += ",error\n";
    for (const auto& c : r.per_context) {
        out += csv_cell(c.descriptor) + "," + (c.ok ? "1" : "0") + ",";
        out += (c.ok ? csv_number(c.tau) : "") + "," + std::to_string(c.d_star_metric) + ",";
        out += (c.ok ? csv_number(c.err_d_star) : "") + "," + std::to_string(c.d_star) + "," + csv_number(c.decay_rate);
        for (Index d : ds) {
            out += ",";
            for (const auto& e : c.err_curve)
                if (e.d == d) out += csv_number(e.test_mse);
        }
        out += "," + csv_cell(c.error) + "\n";
    }
    return out;
}

Json verify_report_to_json(const VerifyReport& r) {
    Json j;
    j["n"] = r.n;
    j["m"] = r.m;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    j["passed"] = r.all_passed();
    j["failures"] = r.failures();
    Json checks = Json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"max_residual", number(c.max_residual)},
                          {"tolerance", c.tolerance},
                          {"evaluations", c.evaluations},
                          {"detail", c.detail}});
    j["checks"] = checks;
    return j;
}

VerifyReport verify_report_from_json(const Json& j) {
    try {
        VerifyReport r;
        r.n = j.at("n").get<Index>();
        r.m = j.at("m").get<Index>();
        r.trials = j.at("trials").get<Index>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& c : j.at("checks")) {
            CheckResult cr;
            cr.name = c.at("name").get<std::string>();
            cr.passed = c.at("passed").get<bool>();
            cr.max_residual = c.at("max_residual").is_null() ? std::numeric_limits<double>::infinity()
                                                             : c.at("max_residual").get<double>();
            cr.tolerance = c.at("tolerance").get<double>();
            cr.evaluations = c.at("evaluations").get<Index>();
            cr.detail = c.at("detail").get<std::string>();
            r.checks.push_back(std::move(cr));
        }
        return r;
    } catch (const Json::exception& e) {
        throw InvalidArgument(std::string("malformed verify report: ") + e.what());
    }
}

std::string verify_report_csv(const VerifyReport& r) {
    std::string out = "name,passed,max_residual,tolerance,evaluations,detail\n";
    for (const auto& c : r.checks)
        out += csv_cell(c.name) + "," + (c.passed ? "1" : "0") + "," + format_double(c.max_residual) + "," +
               format_double(c.tolerance) + "," + std::to_string(c.evaluations) + "," + csv_cell(c.detail) + "\n";
    return out;
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
    return format == ReportFormat::json ? dump_json(experiment_report_to_json(report)) : experiment_report_csv(report);
}

std::string render_report(const VerifyReport& report, ReportFormat format) {
    return format == ReportFormat::json ? dump_json(verify_report_to_json(report)) : verify_report_csv(report);
}

void write_report(const ExperimentReport& report, const std::string& path, ReportFormat format) {
    write_text_atomic(path, render_report(report, format));
}

void write_report(const VerifyReport& report, const std::string& path, ReportFormat format) {
    write_text_atomic(path, render_report(report, format));
}

} // namespace contexture
