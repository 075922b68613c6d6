#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvnn/cli.hpp"

using namespace cvnn;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream o, e;
    int c = run_cli(args, o, e);
    return {c, o.str(), e.str()};
}

nlohmann::json json_of(const Run& r) { return nlohmann::json::parse(r.out); }

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        unsetenv("CVNN_SEED");
        dir = fs::temp_directory_path() / ("cvnn_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                           "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir);
    }
    void TearDown() override {
        unsetenv("CVNN_SEED");
        fs::remove_all(dir);
    }
    std::string write(const std::string& name, const std::string& text) {
        auto p = dir / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

}  // namespace

TEST_F(Cli, ClassifyReportsVerdicts) {
    auto r = run({"classify", "--activation", "ratio"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json_of(r);
    EXPECT_EQ(j["shallow_universal"], "yes");
    EXPECT_EQ(j["deep_universal"], "yes");
    EXPECT_EQ(j["config_echo"]["run"]["activation"], "ratio");
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({"classify", "--activation", "nosuch"}).code, 2);
    EXPECT_NE(run({"classify", "--activation", "nosuch"}).err.find("known:"), std::string::npos);
    EXPECT_EQ(run({"classify"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate", "--activation", "sin"}).code, 2);
    EXPECT_EQ(run({"classify", "--activation", "sin", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"approximate", "--activation", "ratio", "--target", "nosuch"}).code, 2);
    EXPECT_EQ(run({"floor", "--activation", "sin", "--widths", "50,x"}).code, 2);
    EXPECT_EQ(run({"invariants", "--activation", "sin", "--kind", "curl"}).code, 2);
    EXPECT_EQ(run({"classify", "--activation", "sin", "--degree", "two"}).code, 2);
}

TEST_F(Cli, HelpAndVersion) {
    EXPECT_EQ(run({"--help"}).code, 0);
    auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_EQ(v.out, std::string(version_string) + "\n");
}

TEST_F(Cli, RefusedSynthesisExitsOne) {
    auto r = run({"approximate", "--activation", "sin", "--target", "cone"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("refused"), std::string::npos);
}

TEST_F(Cli, ApproximateWritesCertificate) {
    auto r = run({"approximate", "--activation", "ratio", "--target", "rez", "--degree", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json_of(r);
    EXPECT_LT(j["sup_error"].get<double>(), 0.1);
    EXPECT_FALSE(j.contains("wall_time"));
    EXPECT_EQ(j["config_echo"]["run"]["degree"], 2);
    auto t = json_of(run({"approximate", "--activation", "ratio", "--target", "rez", "--degree", "2", "--timing"}));
    EXPECT_TRUE(t.contains("wall_time"));
}

TEST_F(Cli, UnmetToleranceExitsOne) {
    auto r = run({"approximate", "--activation", "ratio", "--target", "cone", "--degree", "2", "--eps", "0.001"});
    EXPECT_EQ(r.code, 1);
    EXPECT_GT(json_of(r)["sup_error"].get<double>(), 0.001);
}

TEST_F(Cli, CsvGridOutput) {
    auto r = run({"approximate", "--activation", "ratio", "--target", "rez", "--degree", "2", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    std::string header;
    std::getline(is, header);
    EXPECT_EQ(header, "z1_re,z1_im,target_re,target_im,approx_re,approx_im,abs_error");
    std::size_t rows = 0;
    for (std::string line; std::getline(is, line);) ++rows;
    EXPECT_EQ(rows, make_grid(cplx{0.0}, 1.0, 65).size());
    auto f = run({"floor", "--activation", "sin", "--widths", "10,20", "--format", "csv"});
    EXPECT_EQ(f.out.substr(0, 25), "width,sup_error,l1_error\n");
}

TEST_F(Cli, OutputFileAndNetwork) {
    auto out = (dir / "c.json").string();
    auto net = (dir / "n.json").string();
    auto r = run({"approximate", "--activation", "ratio", "--target", "rez", "--degree", "2", "--out", out,
                  "--network-out", net});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream is(out);
    auto j = nlohmann::json::parse(is);
    auto theta = load_network(net);
    EXPECT_EQ(theta.depth(), 1);
    EXPECT_EQ(theta.total_neurons(), j["network_size"]["neurons"].get<long>());
}

TEST_F(Cli, ConfigFileIsOverriddenByFlags) {
    auto cfg = write("run.ini", "activation = ratio\ntarget = rez\ndegree = 2\nseed = 7\n");
    auto a = json_of(run({"approximate", "--config", cfg}));
    EXPECT_EQ(a["config_echo"]["run"]["seed"], 7);
    EXPECT_EQ(a["config_echo"]["run"]["degree"], 2);
    auto b = json_of(run({"approximate", "--config", cfg, "--seed", "9", "--degree", "3"}));
    EXPECT_EQ(b["config_echo"]["run"]["seed"], 9);
    EXPECT_EQ(b["config_echo"]["run"]["degree"], 3);
    auto bad = write("bad.ini", "colour = blue\n");
    EXPECT_EQ(run({"classify", "--activation", "sin", "--config", bad}).code, 2);
}

TEST_F(Cli, SeedFallsBackToEnvironment) {
    setenv("CVNN_SEED", "42", 1);
    EXPECT_EQ(json_of(run({"classify", "--activation", "sin"}))["config_echo"]["run"]["seed"], 42);
    EXPECT_EQ(json_of(run({"classify", "--activation", "sin", "--seed", "3"}))["config_echo"]["run"]["seed"], 3);
    auto cfg = write("s.ini", "seed = 5\n");
    EXPECT_EQ(json_of(run({"classify", "--activation", "sin", "--config", cfg}))["config_echo"]["run"]["seed"], 5);
    setenv("CVNN_SEED", "abc", 1);
    EXPECT_EQ(run({"classify", "--activation", "sin"}).code, 2);
}

TEST_F(Cli, InvariantsVerdict) {
    auto ok = run({"invariants", "--activation", "sin", "--layers", "2"});
    ASSERT_EQ(ok.code, 0) << ok.err;
    EXPECT_LE(json_of(ok)["max_residual"].get<double>(), 1e-5);
    EXPECT_EQ(run({"invariants", "--activation", "ratio"}).code, 1);
    EXPECT_EQ(run({"invariants", "--activation", "abs2", "--kind", "laplacian:3"}).code, 0);
}

TEST_F(Cli, RepeatedRunsAreByteIdentical) {
    std::vector<std::string> args{"floor", "--activation", "ratio", "--widths", "20,40"};
    EXPECT_EQ(run(args).out, run(args).out);
    std::vector<std::string> cls{"classify", "--activation", "zlog"};
    EXPECT_EQ(run(cls).out, run(cls).out);
}
