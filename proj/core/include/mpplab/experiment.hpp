#pragma once

#include "mpplab/models.hpp"
#include "mpplab/monte_carlo.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mpplab {

enum class ExperimentKind {
    simulate,
    merge,
    verify_representation,
    verify_orthogonality,
    counterexample,
    martingale_test,
};

std::string to_string(ExperimentKind kind);
/// Throws std::invalid_argument for unknown names.
ExperimentKind parse_experiment_kind(const std::string& name);

enum class ReportFormat { json, csv };

std::string to_string(ReportFormat format);
ReportFormat parse_report_format(const std::string& name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::simulate;
    /// One model, or the components of a merge experiment.
    std::vector<ModelSpec> models;
    /// Overrides the horizon of every model when set.
    std::optional<double> horizon;
    std::size_t replications = 1;
    std::uint64_t seed = 0;
    double tolerance = 1e-6;
    double sigmas = 4.0;
    /// Checkpoint grid size (martingale test, representation, merge grids).
    std::size_t checkpoints = 5;
    unsigned threads = 1;
    std::string output_path;
    ReportFormat output_format = ReportFormat::json;

    // verify-representation
    std::string payoff = "linear";
    std::size_t grid_intervals = 1000;
    /// "uniformization" or "poisson-linear" (closed form for the linear payoff of a birth chain).
    std::string solver = "uniformization";

    // verify-orthogonality / counterexample; no marks means every pair
    std::optional<std::pair<std::string, std::string>> marks;
    std::optional<double> time;

    /// Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
    /// Model specs with the horizon override applied.
    std::vector<ModelSpec> resolved_models() const;
};

/// Reads a JSON config; errors name the offending field or the line and column.
ExperimentConfig parse_experiment_config(const std::string& json_text);
std::string experiment_config_to_json(const ExperimentConfig& config);
/// JSON Schema (draft 2020-12) of the config format.
const char* experiment_config_schema() noexcept;

struct CheckResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::string note;

    friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct NamedEstimate {
    std::string name;
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t replications = 0;

    friend bool operator==(const NamedEstimate&, const NamedEstimate&) = default;
};

struct NamedQuantile {
    std::string name;
    double level = 0.0;
    double value = 0.0;

    friend bool operator==(const NamedQuantile&, const NamedQuantile&) = default;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CheckResult> checks;
    std::vector<NamedEstimate> estimates;
    std::vector<NamedQuantile> quantiles;
    std::vector<std::string> artifacts;
    double duration_seconds = 0.0;
    std::string version;

    bool pass() const noexcept;
};

/// Runs the configured experiment. Deterministic given the config; `threads`
/// never changes the numbers. Simulation failures such as an explosion-guard
/// trip become failed checks.
ExperimentReport run(const ExperimentConfig& config);

/// Structured-text (JSON) report. With include_timing = false the wall-clock
/// duration is omitted, which leaves only reproducible content.
std::string report_to_json(const ExperimentReport& report, bool include_timing = true);
ExperimentReport report_from_json(const std::string& text);

/// Checks, estimates and quantiles only: the part that must not depend on
/// timing or on the thread count.
std::string report_numerics(const ExperimentReport& report);

/// CSV with columns record,name,value,aux,flag:
///   check    name statistic threshold pass(0/1)
///   estimate name mean      std_error replications
///   quantile name value     level     (empty)
///   meta     key  value     (empty)   (empty)
std::string report_to_csv(const ExperimentReport& report);
inline constexpr std::size_t kReportCsvColumns = 5;

/// Writes the report in the requested format. Throws std::ios_base::failure.
void export_report(const ExperimentReport& report, const std::string& path, ReportFormat format);

/// Library version string.
const char* version() noexcept;

/// Directory for outputs named without a directory: $MPPLAB_OUTPUT_DIR or ".".
std::string default_output_dir();
/// Bare file names are placed in default_output_dir(); other paths are kept.
std::string resolve_output_path(const std::string& path);

/// Mark by display form: "a", "(a,0)" or "a,0".
MarkId resolve_mark(const MarkSpace& space, const std::string& text);

} // namespace mpplab
