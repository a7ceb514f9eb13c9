#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "thetawh/cli.hpp"
#include "thetawh/errors.hpp"
#include "thetawh/io.hpp"

using namespace thetawh;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "thetawh");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(THETAWH_DATA_DIR) + "/" + name; }

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("thetawh_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST(Cli, DemoFilesLoad) {
  for (const char* name : {"chi05.json", "chi1.json", "chi15.json", "chi2.json", "chi25.json", "brownian.json"}) {
    const ThetaFamily f = load_params(data(name));
    EXPECT_TRUE(f.calibrated) << name;
    EXPECT_EQ(parse_params(params_to_json(f)).gamma, f.gamma) << name;
  }
}

TEST(Cli, FactorAtZeroIsOne) {
  const Result r = run_cli({"factor", "--params", data("chi15.json"), "--q", "1", "--z", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["pos"]["re"].get<double>(), 1.0, 1e-14);
  EXPECT_NEAR(j["neg"]["re"].get<double>(), 1.0, 1e-14);
  EXPECT_EQ(j["residual"].get<double>(), 0.0);
}

TEST(Cli, BrownianFactor) {
  const Result r = run_cli({"factor", "--params", data("brownian.json"), "--q", "1", "--z", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["pos"]["re"].get<double>(), std::sqrt(2.0) / (std::sqrt(2.0) + 1), 1e-10);
  EXPECT_LT(j["residual"].get<double>(), 1e-10);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"roots"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"roots", "--params", data("chi1.json"), "--q", "-1"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"roots", "--params", "/nonexistent.json"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"factor", "--params", data("chi1.json"), "--z", "-1+2i"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"factor", "--params", data("chi1.json"), "--z", "abc"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"verify", "--params", data("chi1.json"), "--suite", "nope"}).code, cli::kInvalidInput);
  EXPECT_EQ(run_cli({"simulate", "--params", data("chi25.json"), "--paths", "10", "--terms", "1000000"}).code,
            cli::kInvalidInput);
  EXPECT_EQ(run_cli({"--help"}).code, cli::kOk);
}

TEST(Cli, VerifyPassesInterlacing) {
  const Result r = run_cli({"verify", "--params", data("chi2.json"), "--suite", "interlacing", "--q-list", "0.5,2"});
  EXPECT_EQ(r.code, cli::kOk) << r.out;
  EXPECT_NE(r.out.find("PASS 4/4 checks"), std::string::npos) << r.out;
}

TEST(Cli, VerifyReportsAsymptoticFailure) {
  const Result r = run_cli({"verify", "--params", data("chi15.json"), "--suite", "asymptotics", "--q-list", "1"});
  EXPECT_EQ(r.code, cli::kVerifyFailed);
  EXPECT_NE(r.out.find("FAIL "), std::string::npos);
}

TEST_F(TempDir, RootsCsv) {
  const Result r = run_cli({"roots", "--params", data("chi05.json"), "--n", "10", "--extra", "5", "--out", path("r.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = read_file(path("r.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 10 + 5);
}

TEST_F(TempDir, LawRoundTripReproducesGrid) {
  const std::string outs = path("law.json") + "," + path("grid.csv");
  const Result r = run_cli({"sup-dist", "--params", data("chi1.json"), "--q", "1", "--side", "neg", "--grid", "0:3:0.25",
                            "--out", outs});
  ASSERT_EQ(r.code, 0) << r.err;
  const SupremumLaw law = load_law(path("law.json"));
  EXPECT_EQ(law.side, Side::Negative);
  std::ostringstream os;
  write_law_grid_csv(os, law, parse_grid("0:3:0.25"));
  EXPECT_EQ(os.str(), read_file(path("grid.csv")));
  EXPECT_EQ(law_to_json(law), read_file(path("law.json")));
}

TEST_F(TempDir, SimulateCompare) {
  const Result s = run_cli({"sup-dist", "--params", data("chi05.json"), "--side", "pos", "--out", path("law.json")});
  ASSERT_EQ(s.code, 0) << s.err;
  const Result r = run_cli({"simulate", "--params", data("chi05.json"), "--paths", "5000", "--compare", path("law.json"),
                            "--dump", path("raw")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_LT(j["ks"].get<double>(), j["ks_99"].get<double>());
  EXPECT_TRUE(fs::exists(path("raw.bin")));
}

TEST(Params, ValidationNamesField) {
  auto field_of = [](const std::string& text) -> std::string {
    try {
      parse_params(text);
    } catch (const ValidationError& e) {
      return e.field();
    }
    return "";
  };
  const std::string ok =
      R"({"schema_version":1,"chi":1,"sigma":0.5,"mu":0,"c1":1,"c2":1,"alpha1":1,"alpha2":1,"beta1":1,"beta2":1})";
  EXPECT_EQ(field_of(ok), "");
  auto with = [&](const std::string& key, const std::string& value) {
    auto j = nlohmann::json::parse(ok);
    j[key] = nlohmann::json::parse(value);
    return j.dump();
  };
  EXPECT_EQ(field_of(with("chi", "0.75")), "chi");
  EXPECT_EQ(field_of(with("sigma", "-1")), "sigma");
  EXPECT_EQ(field_of(with("c2", "-0.1")), "c2");
  EXPECT_EQ(field_of(with("beta1", "0")), "beta1");
  EXPECT_EQ(field_of(with("alpha2", "\"x\"")), "alpha2");
  EXPECT_EQ(field_of(with("schema_version", "2")), "schema_version");
  EXPECT_EQ(field_of("{"), "json");
  EXPECT_EQ(field_of(R"({"schema_version":1})"), "chi");
}

TEST(Params, Parsers) {
  EXPECT_EQ(parse_complex("0.5+1.2i"), Complex(0.5, 1.2));
  EXPECT_EQ(parse_complex("-2i"), Complex(0, -2));
  EXPECT_EQ(parse_complex("3"), Complex(3, 0));
  EXPECT_EQ(parse_complex("1e-3-4j"), Complex(1e-3, -4));
  EXPECT_THROW(parse_complex("1+"), ValidationError);
  EXPECT_EQ(parse_grid("0:1:0.25").size(), 5u);
  EXPECT_THROW(parse_grid("0:1"), ValidationError);
  EXPECT_EQ(parse_list("0.1, 1,10", "q").size(), 3u);
  EXPECT_THROW(parse_list("1,x", "q"), ValidationError);
  EXPECT_EQ(parse_side("neg"), Side::Negative);
  EXPECT_THROW(parse_side("up"), ValidationError);
}
