#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// End-to-end checks of the command-line harness: exit-code contract,
// determinism of published CSVs, config file handling.

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ACBE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST_CASE("smoothing subcommand passes and writes its artifacts") {
    const auto out = fresh_dir("acbe_cli_smoothing");
    const auto cfg = out / "run.cfg";
    std::ofstream(cfg) << "levels_log2 = -3,-4,-5,-6,-7,-8,-9\nfine_dt_log2 = -9\n";
    CHECK(run_cli("smoothing --config " + cfg.string() + " --out " + out.string()) == 0);
    CHECK(fs::exists(out / "smoothing.csv"));
    CHECK(fs::exists(out / "summary.txt"));
    const std::string csv = slurp(out / "smoothing.csv");
    CHECK(csv.find("# experiment = smoothing") != std::string::npos);
    CHECK(csv.find("dt,error") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("smoothing --config /nonexistent/path.cfg") == 2);

    const auto out = fresh_dir("acbe_cli_badcfg");
    const auto cfg = out / "bad.cfg";
    std::ofstream(cfg) << "not_a_key = 1\n";
    CHECK(run_cli("smoothing --config " + cfg.string()) == 2);
    std::ofstream(cfg) << "fine_dt_log2 = -8\nlevels_log2 = -4,-9\n";
    CHECK(run_cli("smoothing --config " + cfg.string()) == 2);
    fs::remove_all(out);
}

TEST_CASE("same config twice gives byte-identical CSVs") {
    const auto out_a = fresh_dir("acbe_cli_det_a");
    const auto out_b = fresh_dir("acbe_cli_det_b");
    const auto cfg = out_a / "run.cfg";
    std::ofstream(cfg) << "modes = 16\npaths = 6\nlevels_log2 = -4,-5,-6\nfine_dt_log2 = -6\n"
                       << "threads = 2\n";
    const std::string args = "convolution --config " + cfg.string();
    const int rc_a = run_cli(args + " --out " + out_a.string());
    const int rc_b = run_cli(args + " --out " + out_b.string());
    CHECK(rc_a == rc_b);
    auto strip = [](const std::string& s) {
        std::istringstream is(s);
        std::ostringstream os;
        std::string line;
        while (std::getline(is, line))
            if (line.rfind("# out_dir", 0) != 0) os << line << '\n';
        return os.str();
    };
    CHECK(strip(slurp(out_a / "convolution.csv")) == strip(slurp(out_b / "convolution.csv")));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("seed and paths overrides change the outputs") {
    const auto out_a = fresh_dir("acbe_cli_seed_a");
    const auto out_b = fresh_dir("acbe_cli_seed_b");
    const auto cfg = out_a / "run.cfg";
    std::ofstream(cfg) << "modes = 16\npaths = 6\nlevels_log2 = -4,-5,-6\nfine_dt_log2 = -6\n";
    const std::string args = "convolution --config " + cfg.string();
    run_cli(args + " --out " + out_a.string() + " --seed 1");
    run_cli(args + " --out " + out_b.string() + " --seed 2");
    CHECK(slurp(out_a / "convolution.csv") != slurp(out_b / "convolution.csv"));
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("simulate writes a trajectory with config echo and optional dumps") {
    const auto out = fresh_dir("acbe_cli_sim");
    const auto cfg = out / "run.cfg";
    std::ofstream(cfg) << "modes = 16\nfine_dt_log2 = -6\nt_final = 0.25\ndump_noise = true\n"
                       << "dump_state = true\nsimulate.modes = 1,2\nlevels_log2 = -4,-5,-6\n";
    CHECK(run_cli("simulate --config " + cfg.string() + " --out " + out.string()) == 0);
    const std::string csv = slurp(out / "trajectory.csv");
    CHECK(csv.find("t,norm_l2,norm_h1,mode_1,mode_2") != std::string::npos);
    CHECK(fs::exists(out / "noise.csv"));
    CHECK(fs::exists(out / "trajectory.bin"));
    fs::remove_all(out);
}
