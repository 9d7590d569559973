#include <catch2/catch_amalgamated.hpp>

#include "reebkit/scenario.hpp"

#include <filesystem>
#include <fstream>

using namespace reebkit;
namespace fs = std::filesystem;

namespace {
std::string write_temp(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << text;
    return p.string();
}
}  // namespace

TEST_CASE("scenario parsing: key-value, comments, diagnostics") {
    auto kv = parse_kv_text("# comment\ncommand = spectrum\nmodel = sphere # trailing\n");
    REQUIRE(kv.get("command") == "spectrum");
    REQUIRE(kv.get("model") == "sphere");
    REQUIRE_THROWS_AS(parse_kv_text("no equals sign here\n"), ParseError);
    REQUIRE_THROWS_AS(parse_kv_text("= naked value\n"), ParseError);
    REQUIRE_THROWS_AS(parse_int_tuple("1,x,0"), ParseError);
}

TEST_CASE("spectrum scenario") {
    Scenario sc;
    sc.kv = parse_kv_text("command = spectrum\nmodel = sphere\nn = 2\ncap = 7\n");
    auto res = run_scenario(sc);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.report.find("count = 2") != std::string::npos);
}

TEST_CASE("constellation scenario exits by rigidity") {
    Scenario ok;
    ok.kv = parse_kv_text(
        "command = constellation\nmodel = sphere\nn = 2\nclass = e\nT = "
        "3.14159265358979312\ncap = 10\n");
    REQUIRE(run_scenario(ok).exit_code == 0);
    Scenario bad;
    bad.kv = parse_kv_text(
        "command = constellation\nmodel = ellipsoid\nweights = 1.0,1.5\nclass = e\nT = "
        "7.0685834705770345\ncap = 30\n");  // 2.25 pi: violates the sum bound
    REQUIRE(run_scenario(bad).exit_code == 1);
}

TEST_CASE("malformed scenarios exit 2 with diagnostics") {
    auto p1 = write_temp("bad_class.scn", "command = certify\ntheorem = t3\nk = 2\nclass = 1,x\n");
    auto r1 = run_scenario_file(p1);
    REQUIRE(r1.exit_code == 2);
    REQUIRE(r1.report.find("error") != std::string::npos);
    auto p2 = write_temp("bad_cmd.scn", "command = dance\n");
    REQUIRE(run_scenario_file(p2).exit_code == 2);
    auto p3 = write_temp("bad_missing.scn", "command = certify\n");
    REQUIRE(run_scenario_file(p3).exit_code == 2);
}

TEST_CASE("committed scenario fixtures run clean") {
    // cheap fixtures only; the full suite (certificates with scans, the plug)
    // runs in the acceptance binary
    for (std::string name : {"sphere_spectrum", "ellipsoid_constellation", "katok_certificate",
                             "profile_tuning"}) {
        auto res = run_scenario_file(std::string(SCENARIO_DIR) + "/" + name + ".scn");
        INFO(name << "\n" << res.report);
        REQUIRE(res.exit_code == 0);
    }
}

TEST_CASE("reports are byte-identical across repeated runs") {
    Scenario sc;
    sc.kv = parse_kv_text(
        "command = certify\ntheorem = el-sphere\nn = 2\nfactor = ellipsoid "
        "1.0,1.2\nseed_grid = 3,3,3\n");
    auto r1 = run_scenario(sc);
    auto r2 = run_scenario(sc);
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r1.report == r2.report);
}

TEST_CASE("certify scenario: torus persistence with the cos-bump factor") {
    Scenario sc;
    sc.kv = parse_kv_text(
        "command = certify\ntheorem = t3\nk = 2\nclass = 1,0\nfactor = cos_bump "
        "0.2\nseed_grid = 1,8,16\n");
    auto res = run_scenario(sc);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.report.find("guaranteed_count = 4") != std::string::npos);
    REQUIRE(res.report.find("cross_validation = pass") != std::string::npos);
}
