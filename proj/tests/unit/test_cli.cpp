#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct ScratchDir {
    fs::path path;
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

const fs::path& workdir() {
    static const ScratchDir dir = [] {
        fs::path d = fs::temp_directory_path() / ("anisoflow_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return ScratchDir{d};
    }();
    return dir.path;
}

fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = workdir() / name;
    std::ofstream(p) << text;
    return p;
}

int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + " '" ANISOFLOW_CLI "' " + args + " > '" + (workdir() / "stdout").string() + "' 2> '" +
                            (workdir() / "stderr").string() + "'";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string config(const std::string& initial, const std::string& flow, const std::string& out) {
    return R"({"norm": {"family": "euclidean", "dim": 2}, "initial": )" + initial + R"(, "flow": )" + flow +
           R"(, "output_dir": ")" + (workdir() / out).string() + R"("})";
}

}  // namespace

TEST_CASE("simulate writes the output set") {
    const auto cfg = write("circle.json", config(R"({"kind": "circle", "n": 64})",
                                                 R"({"scheme": "radial_graph", "t_end": 0.05})", "out"));
    CHECK(cli("simulate --config " + cfg.string()) == 0);
    for (const char* f : {"diagnostics.csv", "snapshots.ndjson", "run_meta.json"}) CHECK(fs::exists(workdir() / "out" / f));

    const fs::path env_dir = workdir() / "from_env";
    CHECK(cli("simulate --config " + cfg.string(), "ANISOFLOW_OUTPUT='" + env_dir.string() + "'") == 0);
    CHECK(fs::exists(env_dir / "diagnostics.csv"));
}

TEST_CASE("exit codes") {
    const auto ellipse = write("ellipse.json", config(R"({"kind": "ellipse", "n": 64})",
                                                      R"({"scheme": "radial_graph", "t_end": 0.1, "snapshot_every": 5})", "ell"));
    CHECK(cli("verify --suite area --config " + ellipse.string()) == 0);
    CHECK(cli("verify --suite wulff --config " + ellipse.string()) == 1);

    const auto bad = write("bad.json", config(R"({"kind": "circle"})", R"({"scheme": "radial_graph", "t_end": 0.1, "cfl": 0.9})", "bad"));
    CHECK(cli("simulate --config " + bad.string()) == 2);
    CHECK(cli("simulate --config " + (workdir() / "missing.json").string()) == 2);
    CHECK(cli("simulate") == 2);
    CHECK(cli("verify --suite nonsense --config " + ellipse.string()) == 2);

    // one vertex crowding its neighbour: the first step trips the edge-ratio guard
    std::string pts = "[";
    for (int k = 0; k < 24; ++k) {
        const double th = 2 * 3.141592653589793 * k / 24 + (k == 1 ? -0.2610 : 0.0);
        pts += (k ? "," : "") + std::string("[") + std::to_string(std::cos(th)) + "," + std::to_string(std::sin(th)) + "]";
    }
    pts += "]";
    const auto crowded = write("crowded.json", config(R"({"kind": "points", "points": )" + pts + "}",
                                                      R"({"scheme": "parametric_curve", "t_end": 0.1, "tangential_redistribution": false})",
                                                      "crowded"));
    CHECK(cli("simulate --config " + crowded.string()) == 3);
    CHECK(fs::exists(workdir() / "crowded" / "run_meta.json"));

    const auto spec = write("norm.json", R"({"family": "randers", "dim": 2, "b": [0.3, 0.0]})");
    CHECK(cli("norms validate " + spec.string() + " --samples 200") == 0);
    const auto bad_norm = write("bad_norm.json", R"({"family": "randers", "dim": 2, "b": [1.2, 0.0]})");
    CHECK(cli("norms validate " + bad_norm.string()) == 2);
}
