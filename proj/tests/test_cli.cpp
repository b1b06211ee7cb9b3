#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "testsupport.hpp"
#include "wavefoa/dataset_io.hpp"

using namespace wavefoa;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return std::getenv("WAVEFOA_CLI"); }

int run_cli(const std::string& args, const fs::path& workdir, std::string* out = nullptr) {
    const fs::path log = workdir / "cli.log";
    const std::string cmd = std::string(cli_path()) + " " + args + " > " + log.string() +
                            " 2> " + (workdir / "cli.err").string();
    const int status = std::system(cmd.c_str());
    if (out) {
        std::ifstream in(log);
        std::ostringstream ss;
        ss << in.rdbuf();
        *out = ss.str();
    }
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_blob_pgm(const fs::path& p, int w, int h) {
    ScalarField img(Grid(w, h), 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double d1 = (x - 0.25 * w) * (x - 0.25 * w) + (y - 0.3 * h) * (y - 0.3 * h);
            const double d2 = (x - 0.75 * w) * (x - 0.75 * w) + (y - 0.7 * h) * (y - 0.7 * h);
            img.at(x, y) = std::exp(-d1 / 30.0) + std::exp(-d2 / 30.0);
        }
    std::ofstream out(p, std::ios::binary);
    out << "P2\n" << w << " " << h << "\n255\n";
    for (double v : img.values()) out << static_cast<int>(255.0 * std::min(1.0, v)) << "\n";
}

} // namespace

TEST_CASE("simulate on a blank image emits one central full-length fixation") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_blank");
    {
        std::ofstream out(dir / "blank.pgm");
        out << "P2\n32 24\n255\n";
        for (int i = 0; i < 32 * 24; ++i) out << "128\n";
    }
    std::string log;
    const int rc = run_cli("simulate " + (dir / "blank.pgm").string() +
                               " --n 1 --duration 2 --seed 9 --out " +
                               (dir / "out").string(),
                           dir, &log);
    CHECK(rc == 0);
    CHECK(log.find("steps=50") != std::string::npos);

    const Scanpath sp = read_scanpath_json(dir / "out" / "blank_seed9.json");
    REQUIRE(sp.fixations.size() == 1);
    CHECK(sp.fixations[0].duration == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(fs::exists(dir / "out" / "config.resolved.json"));
    fs::remove_all(dir);
}

TEST_CASE("simulate twice with one seed is byte-identical") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_det");
    write_blob_pgm(dir / "stim.pgm", 48, 36);

    const std::string args = "simulate " + (dir / "stim.pgm").string() +
                             " --n 2 --duration 1 --seed 31 --out ";
    CHECK(run_cli(args + (dir / "a").string(), dir) == 0);
    CHECK(run_cli(args + (dir / "b").string(), dir) == 0);
    for (const char* name : {"stim_seed31.json", "stim_seed32.json"}) {
        const std::string a = slurp(dir / "a" / name);
        const std::string b = slurp(dir / "b" / name);
        CHECK(!a.empty());
        CHECK(a == b);
    }
    fs::remove_all(dir);
}

TEST_CASE("a five second run at 25 fps logs 125 steps") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_steps");
    write_blob_pgm(dir / "stim.pgm", 32, 24);
    std::string log;
    const int rc = run_cli("simulate " + (dir / "stim.pgm").string() +
                               " --model DW --duration 5 --n 1 --out " +
                               (dir / "out").string(),
                           dir, &log);
    CHECK(rc == 0);
    CHECK(log.find("steps=125") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("simulate dumps potential snapshots at the requested stride") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_snap");
    write_blob_pgm(dir / "stim.pgm", 32, 24);
    const int rc = run_cli("simulate " + (dir / "stim.pgm").string() +
                               " --n 1 --duration 1 --snapshots 10 --out " +
                               (dir / "out").string(),
                           dir);
    CHECK(rc == 0);
    int count = 0;
    for (const auto& e : fs::directory_iterator(dir / "out" / "snapshots"))
        if (e.path().extension() == ".pgm") ++count;
    CHECK(count == 2); // 25 steps, stride 10
    fs::remove_all(dir);
}

TEST_CASE("evaluate of model paths equal to human paths is the perfect fixture") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_eval");
    fs::create_directories(dir / "stim");
    fs::create_directories(dir / "fix");
    fs::create_directories(dir / "paths");
    write_blob_pgm(dir / "stim" / "s1.pgm", 48, 36);

    // Simulate once, then feed the identical scanpath back as both the
    // ground truth and the model paths.
    CHECK(run_cli("simulate " + (dir / "stim" / "s1.pgm").string() +
                      " --n 1 --duration 3 --seed 4 --out " + (dir / "sim").string(),
                  dir) == 0);
    const Scanpath sp = read_scanpath_json(dir / "sim" / "s1_seed4.json");
    REQUIRE(!sp.fixations.empty());
    {
        std::ofstream csv(dir / "fix" / "s1.csv");
        csv << std::setprecision(17); // bit-exact round trip through the CSV
        csv << "subject,x,y,onset,duration\n";
        for (const Fixation& f : sp.fixations)
            csv << "human," << f.x << "," << f.y << "," << f.onset << "," << f.duration
                << "\n";
    }
    fs::copy_file(dir / "sim" / "s1_seed4.json", dir / "paths" / "s1_seed4.json");

    std::string log;
    const int rc = run_cli("evaluate " + (dir / "stim").string() + " " +
                               (dir / "fix").string() + " --paths " +
                               (dir / "paths").string() + " --out " + (dir / "out").string(),
                           dir, &log);
    CHECK(rc == 0);

    std::ifstream in(dir / "out" / "metrics.json");
    nlohmann::json j;
    in >> j;
    CHECK(j["aggregate"]["sed_mean"].get<double>() == 0.0);
    CHECK(j["aggregate"]["stde_mean"].get<double>() == 1.0);
    CHECK(j["aggregate"]["auc"].get<double>() > 0.9);
    CHECK(j["skipped"].get<int>() == 0);
    fs::remove_all(dir);
}

TEST_CASE("evaluate skips unmatched stimuli and fails with no ground truth at all") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_skip");
    fs::create_directories(dir / "stim");
    fs::create_directories(dir / "fix");
    write_blob_pgm(dir / "stim" / "a.pgm", 24, 24);
    write_blob_pgm(dir / "stim" / "b.pgm", 24, 24);
    write_blob_pgm(dir / "stim" / "c.pgm", 24, 24);

    // Empty fixation dir: every stimulus is skipped, exit 1.
    CHECK(run_cli("evaluate " + (dir / "stim").string() + " " + (dir / "fix").string() +
                      " --out " + (dir / "out0").string(),
                  dir) == 1);

    for (const char* id : {"a", "b"}) {
        std::ofstream csv(dir / "fix" / (std::string(id) + ".csv"));
        csv << "subject,x,y,onset,duration\nh,12,12,0.0,0.4\nh,5,18,0.5,0.3\n";
    }
    std::string log;
    const int rc = run_cli("evaluate " + (dir / "stim").string() + " " +
                               (dir / "fix").string() + " --n 1 --duration 1 --out " +
                               (dir / "out").string(),
                           dir, &log);
    CHECK(rc == 0);
    std::ifstream in(dir / "out" / "metrics.json");
    nlohmann::json j;
    in >> j;
    CHECK(j["skipped"].get<int>() == 1);
    CHECK(j["stimuli"].size() == 2);
    fs::remove_all(dir);
}

TEST_CASE("verify with an unstable explicit configuration reports and exits nonzero") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_unstable");
    // H preset bound is 1e-4; default tau 0.04 is far above it. Use the
    // quick grid so the remaining checks stay cheap.
    std::string log;
    const int rc =
        run_cli("verify --model H --scheme explicit --grid 8 --threads 2", dir, &log);
    CHECK(rc == 2);
    CHECK(log.find("[FAIL] configured scheme stability") != std::string::npos);
    CHECK(log.find("Unstable") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("bench checksums agree across thread counts") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_bench");
    std::string log;
    const int rc = run_cli(
        "bench --grids 32 --bench-threads 1 2 --steps 8 --out " + (dir / "out").string(),
        dir, &log);
    CHECK(rc == 0);
    CHECK(log.find("thread-count determinism OK") != std::string::npos);
    CHECK(fs::exists(dir / "out" / "bench.csv"));
    fs::remove_all(dir);
}

TEST_CASE("config file keys are honored and unknown keys are hard errors") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_cfg");
    write_blob_pgm(dir / "stim.pgm", 32, 24);
    {
        std::ofstream cfg(dir / "run.json");
        cfg << R"({"model": "DW", "duration": 2.0, "n_scanpaths": 1, "seed": 12})";
    }
    std::string log;
    CHECK(run_cli("simulate " + (dir / "stim.pgm").string() + " --config " +
                      (dir / "run.json").string() + " --out " + (dir / "out").string(),
                  dir, &log) == 0);
    CHECK(log.find("steps=50") != std::string::npos); // 2 s at 25 fps
    CHECK(fs::exists(dir / "out" / "stim_seed12.json"));

    {
        std::ofstream cfg(dir / "typo.json");
        cfg << R"({"durration": 2.0})";
    }
    CHECK(run_cli("simulate " + (dir / "stim.pgm").string() + " --config " +
                      (dir / "typo.json").string() + " --out " + (dir / "out2").string(),
                  dir) == 1);
    fs::remove_all(dir);
}

TEST_CASE("quick verify passes end to end") {
    if (!cli_path()) return;
    const auto dir = testsupport::scratch_dir("cli_verify_ok");
    std::string log;
    const int rc = run_cli("verify --grid 8 --threads 2", dir, &log);
    CHECK(rc == 0);
    CHECK(log.find("verification OK") != std::string::npos);
    CHECK(log.find("[FAIL]") == std::string::npos);
    fs::remove_all(dir);
}
