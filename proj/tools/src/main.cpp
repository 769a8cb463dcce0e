#include "anisoflow/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

using namespace anisoflow;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

std::filesystem::path output_dir(const RunConfigFile& config) {
    if (const char* env = std::getenv("ANISOFLOW_OUTPUT"); env && *env) return env;
    return config.output_dir;
}

int simulate_cmd(const std::string& config_path) {
    const RunConfigFile config = parse_config(config_path);
    const auto start = std::chrono::steady_clock::now();
    const RunRecord record = simulate(config);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto dir = output_dir(config);
    emit_outputs(record, config, dir, wall);
    std::cout << "stop=" << to_string(record.stop) << " steps=" << record.steps << " t=" << record.halt_time()
              << " output=" << dir.string() << "\n";
    if (record.stop == StopReason::error) {
        std::cerr << "anisoflow: " << record.message << "\n";
        return kRuntimeError;
    }
    return kOk;
}

int verify_cmd(const std::string& suite, const std::string& config_path) {
    const RunConfigFile config = parse_config(config_path);
    const auto entries = run_verify_suite(config, suite);
    std::cout << to_json(entries) << "\n";
    return suite_passed(entries) ? kOk : kCheckFailed;
}

int norms_validate_cmd(const std::string& spec_path, int samples) {
    std::ifstream in(spec_path);
    if (!in) throw Error(ErrorKind::FileNotFound, spec_path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const ValidationReport report = validate_norm(parse_norm_spec(text), samples);
    std::cout << to_json(report) << "\n";
    return report.all_pass() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anisotropic mean curvature flow in Minkowski spaces"};
    app.require_subcommand(1);

    std::string config_path, suite, spec_path;
    int samples = 1000;

    auto* sim = app.add_subcommand("simulate", "run a flow and write diagnostics.csv, snapshots.ndjson, run_meta.json");
    sim->add_option("--config", config_path, "run configuration (JSON)")->required();

    auto* ver = app.add_subcommand("verify", "run theorem checks and print CheckResults as JSON");
    ver->add_option("--suite", suite, "wulff|area|hmin|convexity|comparison|evolution|all")
        ->required()
        ->check(CLI::IsMember({"wulff", "area", "hmin", "convexity", "comparison", "evolution", "all"}));
    ver->add_option("--config", config_path, "run configuration (JSON)")->required();

    auto* norms = app.add_subcommand("norms", "norm utilities");
    norms->require_subcommand(1);
    auto* validate = norms->add_subcommand("validate", "check the norm axioms and tensor identities");
    validate->add_option("spec", spec_path, "norm spec (JSON)")->required();
    validate->add_option("--samples", samples, "sampled directions")->check(CLI::Range(100, 1000000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (*sim) return simulate_cmd(config_path);
        if (*ver) return verify_cmd(suite, config_path);
        return norms_validate_cmd(spec_path, samples);
    } catch (const Error& e) {
        std::cerr << "anisoflow: " << e.what() << "\n";
        switch (e.kind()) {
            case ErrorKind::SchemaViolation:
            case ErrorKind::FileNotFound:
            case ErrorKind::InvalidParams: return kConfigError;
            default: return kRuntimeError;
        }
    } catch (const std::exception& e) {
        std::cerr << "anisoflow: " << e.what() << "\n";
        return kRuntimeError;
    }
}
