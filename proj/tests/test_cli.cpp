#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "commands.hpp"

using namespace boxseries;
using namespace boxseries::cli;

namespace {

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(BOXSERIES_CLI_PATH) + " " + args + " 2>/dev/null";
    CliResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "boxseries_tests";
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

}  // namespace

TEST(RunConfig, ConfigTextParsing) {
    Settings s = parse_config_text("# harmonic\npotential = 1/2*q^2\nL=8 \n\nI = 250 # terms\n");
    EXPECT_EQ(s.at("potential"), "1/2*q^2");
    EXPECT_EQ(s.at("L"), "8");
    EXPECT_EQ(s.at("I"), "250");
    EXPECT_THROW(parse_config_text("bogus=1"), ValidationError);
    EXPECT_THROW(parse_config_text("no equals sign"), ValidationError);
}

TEST(RunConfig, GSetsZinnJustinConvention) {
    Settings s = preset_settings("zj-dw");
    RunConfig rc = build_run_config(s);
    EXPECT_EQ(rc.hamiltonian.mu, ExactRational(1, 2000));
    EXPECT_EQ(rc.hamiltonian.nu, ExactRational(1000));
    EXPECT_EQ(rc.hamiltonian.shift, ExactRational(1, 2));
    EXPECT_TRUE(effective_ode(rc).is_even());
}

TEST(RunConfig, ValidationBeforeComputation) {
    Settings s = preset_settings("harmonic");
    s["L"] = "0";
    EXPECT_THROW(build_run_config(s), ValidationError);
    s = preset_settings("harmonic");
    s["scan"] = "4,0,40";
    EXPECT_THROW(build_run_config(s), ValidationError);
    s = preset_settings("harmonic");
    s["mode"] = "float";
    EXPECT_THROW(build_run_config(s), ValidationError);
    s = preset_settings("harmonic");
    s["points"] = "0";
    EXPECT_THROW(build_run_config(s), ValidationError);
    s = preset_settings("harmonic");
    s["potential"] = "1/q";
    EXPECT_THROW(build_run_config(s), NonPolynomialError);
    s = preset_settings("harmonic");
    s["mode"] = "decimal";
    s["precision"] = "5";
    EXPECT_THROW(build_run_config(s), ValidationError);
    EXPECT_THROW(preset_settings("nope"), ValidationError);
    s = preset_settings("zj-dw");
    s["g"] = "0";
    EXPECT_THROW(build_run_config(s), ValidationError);
}

TEST(RunConfig, BenchCells) {
    Settings s = preset_settings("quartic-dw");
    s["cells"] = "0:750:100;10:500:300;2:auto:exact";
    RunConfig rc = build_run_config(s);
    ASSERT_EQ(rc.cells.size(), 3u);
    EXPECT_EQ(*rc.cells[0].terms, 750u);
    EXPECT_EQ(rc.cells[1].b, ExactRational(10));
    EXPECT_FALSE(rc.cells[2].terms.has_value());
    EXPECT_EQ(rc.cells[2].precision, 0u);
    s["cells"] = "1:2";
    EXPECT_THROW(build_run_config(s), ValidationError);
}

TEST(Cli, HarmonicSolveTextPaperStyle) {
    CliResult r = run_cli("solve --preset harmonic --levels 2 --scan 0,2,20 --format text --paper-style --jobs 2");
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_NE(r.out.find("N=0 even E=0.50000 00000 00000 00000 00000 0 matched=26"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("N=1 odd E=1.50000 00000 00000 00000 0000 matched=24"), std::string::npos) << r.out;
}

TEST(Cli, JsonRecordsAreDeterministic) {
    const std::string args = "solve --preset harmonic --levels 2 --scan 0,2,20 --I 120 --L 6";
    CliResult a = run_cli(args);
    CliResult b = run_cli(args + " --jobs 2");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    Json doc = Json::parse(a.out);
    ASSERT_EQ(doc["levels"].size(), 2u);
    const Json& lv = doc["levels"][0];
    for (const char* key : {"N", "parity", "energy", "upper", "lower", "matched_digits", "L", "I", "b", "mode",
                            "precision", "n_bisect", "epsilon", "potential_text", "mu", "nu", "shift"})
        EXPECT_TRUE(lv.contains(key)) << key;
    EXPECT_EQ(lv["potential_text"], "1/2*q^2");
}

TEST(Cli, ConfigFileAndFlagPrecedence) {
    auto cfg = temp_file("h.cfg");
    std::ofstream(cfg) << "preset=harmonic\nlevels=1\nscan=0,1,10\nI=80\nL=5\n";
    CliResult r = run_cli("solve --config " + cfg.string() + " --format csv --I 100");
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_EQ(r.out.rfind("N,parity,parity_index,energy", 0), 0u) << r.out;
    EXPECT_NE(r.out.find(",100,"), std::string::npos) << r.out;
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("solve --preset harmonic --L 0").status, 2);
    EXPECT_EQ(run_cli("solve --potential \"1/q\"").status, 2);
    EXPECT_EQ(run_cli("scan --preset harmonic --scan 1,1,10").status, 2);
    EXPECT_EQ(run_cli("wavefunction --preset harmonic --points 0").status, 2);
    EXPECT_EQ(run_cli("zj-check --preset zj-dw --g 0 --reference-only").status, 2);
    EXPECT_EQ(run_cli("solve --preset harmonic --bogus 1").status, 2);
    EXPECT_EQ(run_cli("solve --preset harmonic --bracket 1,2 --parity even").status, 3);
    EXPECT_EQ(run_cli("solve --preset harmonic --scan 0.6,1.4,8 --parity even").status, 3);
}

TEST(Cli, ScanFindsHarmonicBrackets) {
    CliResult r = run_cli("scan --preset harmonic");
    ASSERT_EQ(r.status, 0);
    Json doc = Json::parse(r.out);
    EXPECT_EQ(doc["brackets"].size(), 4u);
    EXPECT_EQ(doc["grid"].size(), 2u * 41u + 4u);
}

TEST(Cli, ScanFindsQuarticDoublets) {
    CliResult r = run_cli("scan --preset quartic-dw --format csv");
    ASSERT_EQ(r.status, 0);
    std::size_t brackets = 0;
    for (std::size_t p = 0; (p = r.out.find("\nbracket,", p)) != std::string::npos; ++p) ++brackets;
    EXPECT_EQ(brackets, 4u);
}

TEST(Cli, WavefunctionSamples) {
    CliResult r = run_cli("wavefunction --preset harmonic --level 0 --points 161 --levels 1 --scan 0,1,10");
    ASSERT_EQ(r.status, 0);
    std::istringstream in(r.out);
    std::string line;
    std::vector<std::pair<double, double>> pts;
    while (std::getline(in, line)) {
        auto tab = line.find('\t');
        ASSERT_NE(tab, std::string::npos);
        pts.emplace_back(std::stod(line.substr(0, tab)), std::stod(line.substr(tab + 1)));
    }
    ASSERT_EQ(pts.size(), 161u);
    EXPECT_DOUBLE_EQ(pts[80].first, 0.0);
    EXPECT_NEAR(std::fabs(pts[80].second), 0.7511255, 1e-6);
}

TEST(Cli, ZJCheckAgainstReferences) {
    CliResult r = run_cli("zj-check --preset zj-dw --reference-only");
    ASSERT_EQ(r.status, 0);
    Json doc = Json::parse(r.out);
    ASSERT_EQ(doc["oracles"].size(), 1u);
    EXPECT_EQ(doc["oracles"][0]["delta_E_computed"], "1.47046e-71");
    EXPECT_LE(std::stod(doc["oracles"][0]["relative_error"].get<std::string>()), 0.05);
}

TEST(Cli, LedgerAppendsOneLinePerRun) {
    auto ledger = temp_file("ledger.jsonl");
    const std::string args = "solve --preset harmonic --levels 1 --scan 0,1,10 --I 60 --L 4 --ledger " + ledger.string();
    ASSERT_EQ(run_cli(args).status, 0);
    ASSERT_EQ(run_cli(args).status, 0);
    std::ifstream in(ledger);
    std::string l1, l2, extra;
    ASSERT_TRUE(std::getline(in, l1));
    ASSERT_TRUE(std::getline(in, l2));
    EXPECT_FALSE(std::getline(in, extra));
    Json a = Json::parse(l1), b = Json::parse(l2);
    EXPECT_EQ(a["config_hash"], b["config_hash"]);
    EXPECT_EQ(a["levels"], b["levels"]);
    EXPECT_EQ(a["tool_version"], kToolVersion);
}

TEST(Cli, BenchReportsPerCell) {
    CliResult r = run_cli(
        "bench --preset quartic-dw --bracket -20.64,-20.63 --cells \"0:750:100;10:500:100\" --format json --jobs 2");
    ASSERT_EQ(r.status, 0) << r.out;
    Json doc = Json::parse(r.out);
    ASSERT_EQ(doc["cells"].size(), 2u);
    EXPECT_TRUE(doc["cells"][0]["reached"].get<bool>());
    EXPECT_FALSE(doc["cells"][1]["reached"].get<bool>());
    EXPECT_FALSE(doc["cells"][1]["error"].get<std::string>().empty());
}
