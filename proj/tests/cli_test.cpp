// tests/cli_test.cpp
// Runs the built nla_cli binary and checks its output and exit codes.
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

// stdout only unless `merge_stderr`.
Run cli(const std::string& args, bool merge_stderr = false) {
    std::string cmd = std::string(NLA_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

fs::path scratch_dir(const std::string& name) {
    auto d = fs::temp_directory_path() / ("nla_cli_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

}  // namespace

TEST(Cli, IterateDefaultCsv) {
    const auto r = cli("iterate --eta 0.2 --t 0.2 --n 5");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 6u);
    EXPECT_EQ(l[0], "n,eta_n,p_cumulative");
    EXPECT_EQ(l[1], "1,0.5,0.32");
    EXPECT_EQ(l[2], "2,0.8,0.16");
    EXPECT_EQ(l[5], "5,0.996108949416,0.065792");
}

TEST(Cli, IterateJson) {
    const auto r = cli("iterate --eta 1 --t 0.3 --n 4 --format json");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 4u);
    for (const auto& row : j) EXPECT_EQ(row["eta_n"].get<double>(), 1.0);
}

TEST(Cli, SweepCsvToStdout) {
    const auto r = cli("sweep --eta 0.2 --t-min 0.2 --t-max 0.5 --t-steps 4 --n 1,5");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 9u);
    EXPECT_EQ(l[0], "eta0,t,n,eta_n,gain_total,p_cumulative");
    EXPECT_EQ(l[1], "0.2,0.2,1,0.5,2.5,0.32");
    EXPECT_EQ(l[2].substr(0, 24), "0.2,0.2,5,0.996108949416");
    EXPECT_EQ(l[7], "0.2,0.5,1,0.2,1,0.5");
    EXPECT_EQ(l[8], "0.2,0.5,5,0.2,1,0.03125");
}

TEST(Cli, SweepIsDeterministic) {
    const auto a = cli("sweep --flavor spe --format json");
    const auto b = cli("sweep --flavor spe --format json");
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(nlohmann::json::parse(a.out).size(), 3u * 99u * 5u);
}

TEST(Cli, SweepCsvDirectory) {
    const auto dir = scratch_dir("sweep");
    const auto r = cli("sweep --t-steps 9 --t-min 0.1 --t-max 0.9 --out " + (dir / "csv").string());
    ASSERT_EQ(r.code, 0);
    for (const char* name : {"sps_eta0.2.csv", "sps_eta0.6.csv", "sps_eta0.9.csv"})
        EXPECT_TRUE(fs::exists(dir / "csv" / name)) << name;
    fs::remove_all(dir);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto dir = scratch_dir("config");
    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"eta": [0.6], "t_min": 0.3, "t_max": 0.3, "t_steps": 1, "n": [2], "format": "json"})";
    const auto from_file = cli("sweep --config " + cfg.string());
    ASSERT_EQ(from_file.code, 0);
    auto j = nlohmann::json::parse(from_file.out);
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["eta0"].get<double>(), 0.6);
    EXPECT_EQ(j[0]["n"].get<int>(), 2);

    const auto overridden = cli("sweep --config " + cfg.string() + " --n 3 --format csv");
    ASSERT_EQ(overridden.code, 0);
    const auto l = lines(overridden.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_EQ(l[1].substr(0, 10), "0.6,0.3,3,");
    fs::remove_all(dir);
}

TEST(Cli, ConfigErrorsExitTwo) {
    EXPECT_EQ(cli("sweep --t-min 0").code, 2);
    EXPECT_EQ(cli("sweep --t-max 1").code, 2);
    EXPECT_EQ(cli("sweep --n 0").code, 2);
    EXPECT_EQ(cli("sweep --flavor qubit").code, 2);
    EXPECT_EQ(cli("sweep --format xml").code, 2);
    EXPECT_EQ(cli("sweep --config /nonexistent/cfg.json").code, 2);
    EXPECT_EQ(cli("sweep --out /nonexistent_dir_for_nla/x.json --format json").code, 2);
    EXPECT_EQ(cli("iterate --t 1.5").code, 2);
    EXPECT_EQ(cli("iterate --n notanumber").code, 2);
    EXPECT_EQ(cli("").code, 2);
    EXPECT_EQ(cli("bogus").code, 2);
}

TEST(Cli, Fig8RejectsNonAmplifyingStage) {
    const auto r = cli("fig8 --t2 0.6", true);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("t2 < 1/2"), std::string::npos) << r.out;
    EXPECT_EQ(cli("fig8 --t1 0.5 --t2 0.5 --t3 0.5 --allow-non-amplifying").code, 0);
}

TEST(Cli, Fig8Report) {
    const auto r = cli("fig8 --t1 0.5 --t2 0.2 --t3 0.2");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["circuit"]["prepared_eta"].get<double>(), 0.5, 1e-15);
    EXPECT_NEAR(j["circuit"]["final_eta"].get<double>(), 0.9411764705882353, 1e-12);
    EXPECT_LT(j["deviation"]["final_eta"].get<double>(), 1e-12);
}

TEST(Cli, SpeReport) {
    const auto r = cli("spe --eta 0.2 --t 0.2 --n 3");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["stages"].size(), 3u);
    EXPECT_NEAR(j["stages"][0]["p_cumulative"].get<double>(), 0.064, 1e-15);
}

TEST(Cli, VerifySmallGridPasses) {
    for (const char* flavor : {"sps", "spe"}) {
        const auto r = cli(std::string("verify --flavor ") + flavor + " --eta 0.1,0.5 --t-min 0.2 --t-max 0.5 --t-steps 2 --n 1,2");
        ASSERT_EQ(r.code, 0) << flavor;
        const auto j = nlohmann::json::parse(r.out);
        EXPECT_TRUE(j["passed"].get<bool>());
        EXPECT_EQ(j["points"].get<int>(), 8);
    }
}

TEST(Cli, NumericUnderflowExitsFour) {
    // Success probability t^2 underflows to zero for the vacuum input.
    const auto r = cli("iterate --flavor spe --eta 0 --t 1e-200 --n 1", true);
    EXPECT_EQ(r.code, 4) << r.out;
    EXPECT_EQ(cli("spe --eta 0 --t 1e-200 --n 1").code, 4);
}
