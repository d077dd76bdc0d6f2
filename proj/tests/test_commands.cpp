#include "sds/commands.hpp"

#include "sds/model.hpp"
#include "sds/output.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sds;

namespace {

std::string sandbox()
{
    static const std::string dir = [] {
        const auto path = std::filesystem::temp_directory_path() / "sds_cmd_tests";
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
        return path.string();
    }();
    return dir;
}

std::string write_cfg(const std::string& name, const std::string& text)
{
    const std::string path = sandbox() + "/" + name + ".cfg";
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("trivial planar run, determinism, verify")
{
    const std::string cfg_path = write_cfg(
        "trivial", "model {\n  N = 0\n  m = 1\n  g0 = 1\n  a = 0\n}\n"
                   "grid {\n  R = 6\n  n = 33\n}\n"
                   "output {\n  directory = " + sandbox() + "/triv\n  basename = t\n}\n");
    std::ostringstream log;
    CHECK(run_command("solve-planar", cfg_path, log) == 0);

    const std::string field = sandbox() + "/triv/t_field.csv";
    const std::string first = slurp(field);
    CHECK(first.find("x,y,v,u,F12,H,eta,Kg") == 0);

    // identical config gives a bit-identical dump
    CHECK(run_command("solve-planar", cfg_path, log) == 0);
    CHECK(slurp(field) == first);

    const auto summary = read_summary(sandbox() + "/triv/t_summary.txt");
    CHECK(summary.at("kind") == "planar");
    CHECK(std::stod(summary.at("flux_total")) == doctest::Approx(0.0).epsilon(1e-12));

    // verify an existing artifact, then verify a fresh solve from config only
    const std::string vcfg =
        write_cfg("trivial_verify", "verify {\n  artifact = " + sandbox() + "/triv/t\n}\n");
    CHECK(run_command("verify", vcfg, log) == 0);
    const std::string fresh = write_cfg(
        "trivial_fresh", "model {\n  N = 0\n  m = 1\n  g0 = 1\n  a = 0\n}\n"
                         "grid {\n  R = 6\n  n = 33\n}\n"
                         "output {\n  directory = " + sandbox() +
                             "/fresh\n  basename = t\n}\n");
    CHECK(run_command("verify", fresh, log) == 0);
}

TEST_CASE("regime gates map to exit code 2")
{
    std::ostringstream log;
    // a*N > 1
    const std::string bad = write_cfg("regime", "model {\n  N = 2\n  a = 0.6\n}\n");
    CHECK(run_command("solve-planar", bad, log) == 2);
    // critical single center is deferred to the radial command
    const std::string single = write_cfg(
        "single", "model {\n  N = 1\n  m = 1\n  a = 1\n  g0 = auto\n}\n"
                  "grid {\n  R = 8\n  n = 49\n}\n"
                  "output {\n  directory = " + sandbox() + "/single\n  basename = s\n}\n");
    CHECK(run_command("solve-planar", single, log) == 2);
    // ... while the same coupling with two separated centers runs
    const std::string sep = write_cfg(
        "critsep", "model {\n  N = 2\n  m = 1\n  a = 0.5\n  g0 = auto\n}\n"
                   "centers {\n  point = 0.9684 0.104 1\n  point = -0.9684 -0.104 1\n}\n"
                   "grid {\n  R = 8\n  n = 65\n}\n"
                   "delta {\n  schedule = 0.5 0.25 0.125 0.0625\n}\n"
                   "output {\n  directory = " + sandbox() + "/critsep\n  basename = c\n}\n");
    CHECK(run_command("solve-planar", sep, log) == 0);
    // radial refuses away from the critical coupling
    const std::string offcrit = write_cfg(
        "offcrit", "model {\n  N = 2\n  m = 1\n  a = 0.25\n}\n");
    CHECK(run_command("solve-radial", offcrit, log) == 2);
    // radial refuses an uncalibrated explicit g0
    const std::string uncal = write_cfg(
        "uncal", "model {\n  N = 1\n  m = 1\n  a = 1\n  g0 = 3\n}\n");
    CHECK(run_command("solve-radial", uncal, log) == 2);
    // missing config file and unknown command are config errors
    CHECK(run_command("solve-planar", sandbox() + "/nope.cfg", log) == 3);
    CHECK(run_command("frobnicate", bad, log) == 3);
}

TEST_CASE("radial solve artifacts and verify")
{
    const std::string out = sandbox() + "/radial";
    const std::string cfg_path = write_cfg(
        "radial", "model {\n  N = 1\n  m = 1\n  g0 = auto\n}\n"
                  "radial {\n  t0 = auto\n  t_end = 14\n  step = 0.001\n}\n"
                  "output {\n  directory = " + out + "\n  basename = r\n}\n");
    std::ostringstream log;
    REQUIRE(run_command("solve-radial", cfg_path, log) == 0);

    const auto summary = read_summary(out + "/r_summary.txt");
    CHECK(summary.at("kind") == "radial");
    CHECK(std::stod(summary.at("g0")) == doctest::Approx(2.0 * std::exp(1.0)));
    const double fit = std::stod(summary.at("decay_rate_fit"));
    CHECK(fit == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
    CHECK(std::stod(summary.at("conservation_max_march")) <= 1e-8 * 4.0);
    CHECK(std::stod(summary.at("flux_total")) ==
          doctest::Approx(2.0 * M_PI).epsilon(0.01));

    // the resolved config reparses and the profile has the t = 0 row (r = 1)
    const CsvTable table = read_csv(out + "/r_profile.csv");
    bool has_r1 = false;
    for (const auto& row : table.rows)
        if (row[0] == 0.0 && row[1] == 1.0)
            has_r1 = true;
    CHECK(has_r1);

    const std::string vcfg =
        write_cfg("radial_verify", "verify {\n  artifact = " + out + "/r\n}\n");
    CHECK(run_command("verify", vcfg, log) == 0);
}

TEST_CASE("tampered field dump fails verification")
{
    const std::string out = sandbox() + "/tamper";
    const std::string cfg_path = write_cfg(
        "tamper", "model {\n  N = 1\n  m = 1\n  a = 0.5\n  g0 = auto\n}\n"
                  "centers {\n  point = 0.3748 0.1231 1\n}\n"
                  "grid {\n  R = 8\n  n = 65\n}\n"
                  "delta {\n  schedule = 0.5 0.25 0.125 0.0625 0.03125\n}\n"
                  "output {\n  directory = " + out + "\n  basename = f\n}\n");
    std::ostringstream log;
    REQUIRE(run_command("solve-planar", cfg_path, log) == 0);

    const std::string vcfg =
        write_cfg("tamper_verify", "verify {\n  artifact = " + out + "/f\n}\n");
    CHECK(run_command("verify", vcfg, log) == 0);

    // corrupt one v entry mid-file
    CsvTable table = read_csv(out + "/f_field.csv");
    table.rows[table.rows.size() / 2 + 13][2] += 0.1;
    write_csv(out + "/f_field.csv", table);

    std::ostringstream log2;
    CHECK(run_command("verify", vcfg, log2) == 1);
    // the residual and self-dual consistency checks both catch it
    CHECK(log2.str().find("[FAIL] residual") != std::string::npos);
    CHECK(log2.str().find("[FAIL] self-dual") != std::string::npos);
}

TEST_CASE("sweep over N and m")
{
    const std::string out = sandbox() + "/sweep";
    const std::string cfg_path = write_cfg(
        "sweep", "sweep {\n  N_values = 1 2\n  m_values = 1\n}\n"
                 "radial {\n  t_end = 12\n  step = 0.001\n}\n"
                 "output {\n  directory = " + out + "\n  basename = sw\n}\n");
    std::ostringstream log;
    REQUIRE(run_command("sweep", cfg_path, log) == 0);

    const CsvTable table = read_csv(out + "/sw_sweep.csv");
    REQUIRE(table.rows.size() == 2);
    CHECK(table.header[3] == "rate_fit");
    for (const auto& row : table.rows) {
        const double rel = row[5];
        CHECK(rel <= 0.02);
    }
    CHECK(std::filesystem::exists(out + "/sw_N2_m1_profile.csv"));

    const std::string bad = write_cfg("sweep_bad", "sweep {\n  N_values = 1\n}\n");
    CHECK(run_command("sweep", bad, log) == 3);
}
