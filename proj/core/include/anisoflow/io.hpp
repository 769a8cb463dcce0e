#pragma once

#include "anisoflow/verify.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace anisoflow {

/// Initial data. kind is one of circle, ellipse, wulff, radial_values, points;
/// only the fields of that kind are read.
struct ShapeSpec {
    std::string kind = "circle";
    std::vector<double> center;  // defaults to the origin
    int n = 256;                 // vertices, or longitudes for surfaces
    int n_phi = 0;               // colatitude rows (3D radial graphs)
    double radius = 1.0;
    double a = 2.0;
    double b = 1.0;
    std::vector<double> values;               // radial_values
    std::vector<std::vector<double>> points;  // points

    bool operator==(const ShapeSpec&) const = default;
};

struct ComparisonSpec {
    double inner_radius = 0.8;
    double outer_radius = 2.2;

    bool operator==(const ComparisonSpec&) const = default;
};

struct VerifySpec {
    int evolution_steps = 20;
    ComparisonSpec comparison;

    bool operator==(const VerifySpec&) const = default;
};

struct RunConfigFile {
    NormSpec norm;
    ShapeSpec initial;
    FlowConfig flow;
    std::string output_dir = "anisoflow_output";
    VerifySpec verify;

    bool operator==(const RunConfigFile&) const = default;
};

/// Throws FileNotFound, SchemaViolation (unknown keys included).
RunConfigFile parse_config(const std::filesystem::path& path);
RunConfigFile parse_config_text(std::string_view json_text);
/// Canonical JSON with every default filled in; parses back to the same config.
std::string config_to_json(const RunConfigFile& config);

/// {"family": ..., "dim": ..., ...} as used in config files.
NormSpec parse_norm_spec(std::string_view json_text);

std::shared_ptr<const MinkowskiNorm> make_norm(const RunConfigFile& config);
/// The initial state in the representation flow.scheme steps (level-set runs
/// start from the parametric curve).
SurfaceState build_initial(const RunConfigFile& config);
SurfaceState build_initial(const RunConfigFile& config, Representation rep);

RunRecord simulate(const RunConfigFile& config);

/// diagnostics.csv, snapshots.ndjson and run_meta.json. Everything except the
/// wall_time_s field of run_meta.json is byte-stable. Throws IoError.
std::vector<std::filesystem::path> emit_outputs(const RunRecord& record, const RunConfigFile& config,
                                                const std::filesystem::path& output_dir, double wall_time_s);

std::string diagnostics_csv(const RunRecord& record);
std::string snapshot_json(const Snapshot& snap);

// -- verify suites -----------------------------------------------------------

struct SuiteEntry {
    CheckResult result;
    bool skipped = false;
    std::string error;  // set when the check's precondition failed
};

/// suite is wulff, area, hmin, convexity, comparison, evolution or all. A
/// named suite reports a failed precondition as a failing entry; "all" skips
/// checks whose preconditions the initial data does not meet.
std::vector<SuiteEntry> run_verify_suite(const RunConfigFile& config, std::string_view suite);
bool suite_passed(const std::vector<SuiteEntry>& entries);

std::string to_json(const CheckResult& result);
std::string to_json(const std::vector<SuiteEntry>& entries);
std::string to_json(const ValidationReport& report);

}  // namespace anisoflow
