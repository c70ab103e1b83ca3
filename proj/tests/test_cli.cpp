#include "config.hpp"
#include "runner.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace mmtdd;
using namespace mmtdd::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("mmtdd_test_" + name + "_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
    fs::remove_all(d);
    return d;
}

std::string error_of(const json& j)
{
    try {
        parse_config(j);
    } catch (const ParamError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Cli, NetworkDefaultsMatchTheLibrary)
{
    EXPECT_EQ(params_hash(network_params(network_defaults()), ModelOptions{}),
              params_hash(NetworkParams::defaults(), ModelOptions{}));
    EXPECT_EQ(params_hash(parse_config(json::object()).params(), ModelOptions{}),
              params_hash(NetworkParams::defaults(), ModelOptions{}));
}

TEST(Cli, UnitsAreConvertedAtTheBoundary)
{
    const auto c = parse_config(json::parse(R"({"network": {"lambda_m_per_km2": 50, "p_m_dbm": 40,
        "f_c_ghz": 73, "w_mhz": 2000, "delta_u_deg": 90, "access_scheme": "dynamic"},
        "model": {"noise_dbm": -90}})"));
    const auto p = c.params();
    EXPECT_NEAR(p.lambda_m, 50e-6, 1e-18);
    EXPECT_NEAR(p.P(Device::M), 10.0, 1e-12);
    EXPECT_DOUBLE_EQ(p.f_c, 73e9);
    EXPECT_DOUBLE_EQ(p.W, 2e9);
    EXPECT_NEAR(p.beamwidth[idx(Device::U)], M_PI / 2, 1e-15);
    EXPECT_EQ(p.access_scheme, AccessScheme::Dynamic);
    EXPECT_NEAR(c.options().noise_override, dbm_to_watt(-90), 1e-20);
}

TEST(Cli, CanonicalFormRoundTrips)
{
    const auto j = json::parse(R"({"kind": "sweep", "network": {"eta": 0.3, "frame_slots": 10},
        "run": {"deltas": [0.2, 0.4], "objective": "two-hop", "links": ["ul_backhaul"], "slots": [7]},
        "mc": {"seed": 9, "drops": 50}, "sweep": {"axes": [{"param": "eta", "values": [0.1, 0.9]}],
        "inner": "optimize-delta"}, "output": {"dir": "x"}})");
    const auto c = parse_config(j);
    const auto once = to_json(c);
    const auto twice = to_json(parse_config(once));
    EXPECT_EQ(once.dump(), twice.dump());
    EXPECT_EQ(config_hash(c), config_hash(parse_config(once)));
    auto moved = c;
    moved.output_dir = "elsewhere";
    moved.parallelism = 3;
    EXPECT_EQ(config_hash(c), config_hash(moved));
    moved.mc.seed = 10;
    EXPECT_NE(config_hash(c), config_hash(moved));
    EXPECT_EQ(hex64(0xabcULL), "0000000000000abc");
}

TEST(Cli, ErrorsNameTheField)
{
    EXPECT_NE(error_of({{"network", {{"lambda_q_per_km2", 3}}}}).find("lambda_q_per_km2"), std::string::npos);
    EXPECT_NE(error_of({{"colour", 1}}).find("colour"), std::string::npos);
    EXPECT_NE(error_of({{"network", {{"eta", "half"}}}}).find("eta"), std::string::npos);
    EXPECT_NE(error_of({{"model", {{"ue_activity", "sometimes"}}}}).find("model.ue_activity"), std::string::npos);
    EXPECT_NE(error_of({{"run", {{"deltas", json::array()}}}}).find("run.deltas"), std::string::npos);
    EXPECT_NE(error_of({{"sweep", {{"axes", {{{"param", "eta"}, {"values", json::array()}}}}}}}).find("eta"),
              std::string::npos);
    EXPECT_THROW(run_kind_from_string("simulate"), ParamError);
}

TEST(Cli, SweepPointsVaryTheLastAxisFastest)
{
    auto c = parse_config(json::parse(R"({"sweep": {"axes": [
        {"param": "eta", "values": [0.1, 0.2]},
        {"param": "access_scheme", "values": ["static", "dynamic", "static"]}]}})"));
    const auto pts = sweep_points(c);
    ASSERT_EQ(pts.size(), 6u);
    EXPECT_EQ(pts[0].at("eta"), 0.1);
    EXPECT_EQ(pts[1].at("access_scheme"), "dynamic");
    EXPECT_EQ(pts[3].at("eta"), 0.2);
    EXPECT_EQ(pts[3].at("access_scheme"), "static");

    SweepAxis big;
    big.param = "eta";
    for (int k = 0; k < 101; ++k) big.values.push_back(0.5);
    c.axes = {big, big};
    EXPECT_THROW(sweep_points(c), ParamError);
}

TEST(Cli, OverrideAxesApplyEveryField)
{
    auto c = parse_config(json::parse(R"({"sweep": {"axes": [
        {"values": [{"lambda_m_per_km2": 40, "lambda_s_per_km2": 60}, {"lambda_m_per_km2": 80, "lambda_s_per_km2": 20}]}]}})"));
    const auto pts = sweep_points(c);
    ASSERT_EQ(pts.size(), 2u);
    EXPECT_NEAR(network_params(pts[1]).lambda_s, 20e-6, 1e-18);
}

TEST(Cli, ResumedSweepWritesTheSameFile)
{
    auto c = parse_config(json::parse(R"({"kind": "sweep", "network": {"frame_slots": 2},
        "sweep": {"axes": [{"param": "eta", "values": [0.2, 0.5, 0.8]},
                           {"param": "backhaul_scheme", "values": ["sab", "uab"]}]}})"));
    const auto dir = scratch("resume");
    EXPECT_EQ(run_sweep(c, dir.string()), 6u);
    const std::string full = slurp(dir / "sweep.csv");

    // Keep the stamp and two finished points, as if the run had been cut short.
    std::istringstream man(slurp(dir / "sweep.manifest"));
    std::string line, kept;
    for (int k = 0; k < 3 && std::getline(man, line); ++k) kept += line + '\n';
    std::ofstream(dir / "sweep.manifest", std::ios::trunc) << kept;
    fs::remove(dir / "sweep.csv");
    EXPECT_EQ(run_sweep(c, dir.string()), 4u);
    EXPECT_EQ(slurp(dir / "sweep.csv"), full);

    // A different configuration ignores the stale manifest.
    c.network["eta"] = 0.4;
    EXPECT_EQ(run_sweep(c, dir.string()), 6u);
    fs::remove_all(dir);
}

TEST(Cli, InvalidSweepPointsFailBeforeWriting)
{
    auto c = parse_config(json::parse(R"({"sweep": {"axes": [{"param": "eta", "values": [0.5, 1.5]}]}})"));
    const auto dir = scratch("invalid");
    EXPECT_THROW(run_sweep(c, dir.string()), ParamError);
    EXPECT_FALSE(fs::exists(dir / "sweep.csv"));
}

TEST(Cli, CoverageOutputIsStamped)
{
    auto c = parse_config(json::parse(R"({"kind": "coverage", "run": {"links": ["dl_access"], "slots": [1],
        "tau_db": {"lo": 0, "hi": 4, "step": 2}}})"));
    std::ostringstream os;
    write_coverage(c, os);
    const std::string s = os.str();
    EXPECT_EQ(s.rfind("# mmtdd ", 0), 0u);
    EXPECT_NE(s.find("config=" + hex64(config_hash(c))), std::string::npos);
    EXPECT_NE(s.find("\nlink,scheme_a,scheme_b,slot,tier,tau_db,coverage\n"), std::string::npos);
    EXPECT_NE(s.find("dl_access,static,sab,1,all,2.000000,"), std::string::npos);
}
