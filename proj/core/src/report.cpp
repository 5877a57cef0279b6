#include "mpplab/experiment.hpp"

#include "json_util.hpp"
#include "mpplab/serialization.hpp"

#include <fstream>
#include <sstream>

namespace mpplab {

using detail::FieldError;
using detail::json;

namespace {

json numerics_json(const ExperimentReport& r)
{
    json j;
    j["pass"] = r.pass();
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
        j["checks"].push_back(
            {{"name", c.name}, {"statistic", c.statistic}, {"threshold", c.threshold}, {"pass", c.pass}, {"note", c.note}});
    }
    j["estimates"] = json::array();
    for (const auto& e : r.estimates) {
        j["estimates"].push_back({{"name", e.name},
                                  {"mean", e.mean},
                                  {"standard_error", e.standard_error},
                                  {"replications", e.replications}});
    }
    j["quantiles"] = json::array();
    for (const auto& q : r.quantiles) {
        j["quantiles"].push_back({{"name", q.name}, {"level", q.level}, {"value", q.value}});
    }
    return j;
}

} // namespace

std::string report_numerics(const ExperimentReport& report)
{
    return numerics_json(report).dump(2) + "\n";
}

std::string report_to_json(const ExperimentReport& report, bool include_timing)
{
    json j;
    j["schema"] = "mpplab.report";
    j["version"] = "v1";
    j["toolkit_version"] = report.version;
    j["config"] = json::parse(experiment_config_to_json(report.config));
    const auto numerics = numerics_json(report);
    for (auto it = numerics.begin(); it != numerics.end(); ++it) j[it.key()] = it.value();
    j["artifacts"] = report.artifacts;
    if (include_timing) j["duration_seconds"] = report.duration_seconds;
    return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text)
{
    const json j = detail::parse_document(text, "report");
    if (!j.is_object() || j.value("schema", "") != "mpplab.report") {
        throw FieldError("report.schema", "not an mpplab report");
    }
    ExperimentReport r;
    r.version = detail::string(detail::field(j, "toolkit_version", "report"), "report.toolkit_version");
    r.config = parse_experiment_config(detail::field(j, "config", "report").dump());
    const auto& checks = detail::field(j, "checks", "report");
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const std::string p = "report.checks[" + std::to_string(i) + "]";
        const auto& c = checks[i];
        r.checks.push_back({detail::string(detail::field(c, "name", p), p + ".name"),
                            detail::number(detail::field(c, "statistic", p), p + ".statistic"),
                            detail::number(detail::field(c, "threshold", p), p + ".threshold"),
                            detail::field(c, "pass", p).get<bool>(),
                            detail::string(detail::field(c, "note", p), p + ".note")});
    }
    const auto& estimates = detail::field(j, "estimates", "report");
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const std::string p = "report.estimates[" + std::to_string(i) + "]";
        const auto& e = estimates[i];
        r.estimates.push_back({detail::string(detail::field(e, "name", p), p + ".name"),
                               detail::number(detail::field(e, "mean", p), p + ".mean"),
                               detail::number(detail::field(e, "standard_error", p), p + ".standard_error"),
                               detail::unsigned_integer(detail::field(e, "replications", p), p + ".replications")});
    }
    const auto& quantiles = detail::field(j, "quantiles", "report");
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        const std::string p = "report.quantiles[" + std::to_string(i) + "]";
        const auto& q = quantiles[i];
        r.quantiles.push_back({detail::string(detail::field(q, "name", p), p + ".name"),
                               detail::number(detail::field(q, "level", p), p + ".level"),
                               detail::number(detail::field(q, "value", p), p + ".value")});
    }
    if (j.contains("artifacts")) r.artifacts = j["artifacts"].get<std::vector<std::string>>();
    if (j.contains("duration_seconds")) r.duration_seconds = detail::number(j["duration_seconds"], "report.duration_seconds");
    return r;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

} // namespace

std::string report_to_csv(const ExperimentReport& report)
{
    std::ostringstream out;
    out << "record,name,value,aux,flag\n";
    out << "meta,kind," << to_string(report.config.kind) << ",,\n";
    out << "meta,seed," << report.config.seed << ",,\n";
    out << "meta,replications," << report.config.replications << ",,\n";
    out << "meta,toolkit_version," << csv_field(report.version) << ",,\n";
    out << "meta,pass," << (report.pass() ? 1 : 0) << ",,\n";
    out << "meta,duration_seconds," << format_double(report.duration_seconds) << ",,\n";
    for (const auto& c : report.checks) {
        out << "check," << csv_field(c.name) << ',' << format_double(c.statistic) << ',' << format_double(c.threshold)
            << ',' << (c.pass ? 1 : 0) << '\n';
    }
    for (const auto& e : report.estimates) {
        out << "estimate," << csv_field(e.name) << ',' << format_double(e.mean) << ','
            << format_double(e.standard_error) << ',' << e.replications << '\n';
    }
    for (const auto& q : report.quantiles) {
        out << "quantile," << csv_field(q.name) << ',' << format_double(q.value) << ',' << format_double(q.level)
            << ",\n";
    }
    return out.str();
}

void export_report(const ExperimentReport& report, const std::string& path, ReportFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    out << (format == ReportFormat::json ? report_to_json(report) : report_to_csv(report));
    out.flush();
    if (!out) throw std::ios_base::failure("failed writing '" + path + "'");
}

} // namespace mpplab
