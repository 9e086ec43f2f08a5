#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "cheng");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cheng::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cheng-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result in_dir(std::vector<std::string> args) {
    args.push_back("--out");
    args.push_back(dir_.string());
    return invoke(std::move(args));
  }
  json report(const std::string& stem) { return json::parse(slurp(dir_ / (stem + ".json"))); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, UnknownIdentifiersAreUsageErrors) {
  EXPECT_EQ(in_dir({"reduce", "case9"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({"solve", "travelling", "--form", "guess"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({"verify-symmetries", "--only", "Gamma9"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({"verify-symmetries", "--field", "d/du", "--system", "nope"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({"report", "travelling", "--flow", "Gamma1B"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({"solve", "travelling", "--nt", "3"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({}).code, cheng::cli::kUsage);
  EXPECT_FALSE(fs::exists(dir_));
}

TEST_F(Cli, HelpIsNotAnError) { EXPECT_EQ(invoke({"--help"}).code, cheng::cli::kOk); }

TEST_F(Cli, NonSymmetryFails) {
  const auto r = in_dir({"verify-symmetries", "--field", "d/du", "--system", "cheng"});
  EXPECT_EQ(r.code, cheng::cli::kFailed);
  const auto j = report("verify-symmetries");
  ASSERT_EQ(j["results"].size(), 1u);
  EXPECT_FALSE(j["results"][0]["passed"]);
  EXPECT_EQ(j["results"][0]["residuals"][0], "a*v");
}

TEST_F(Cli, InstantiatedGammaOne) {
  const auto r = in_dir({"verify-symmetries", "--only", "Gamma1", "--g", "x^2"});
  EXPECT_EQ(r.code, cheng::cli::kOk) << r.out << r.err;
  EXPECT_EQ(report("verify-symmetries")["results"][0]["generator"], "-2*v*x*d/dv + x^2*d/dx");
}

TEST_F(Cli, ReduceTravellingWave) {
  const auto r = in_dir({"reduce", "case1"});
  EXPECT_EQ(r.code, cheng::cli::kOk);
  EXPECT_NE(r.out.find("a*k(f)*w(f) + w'(f) = 0"), std::string::npos) << r.out;
  const auto j = report("reduce-case1");
  EXPECT_TRUE(j["system_check"]["passed"]);
  EXPECT_EQ(j["system_check"]["matches"][1]["multiplier"], "-1");
}

TEST_F(Cli, ReduceEulerChart) {
  const auto r = in_dir({"reduce", "case2b", "--chart", "invariants", "--generator", "1"});
  EXPECT_EQ(r.code, cheng::cli::kOk) << r.out;
  const auto j = report("reduce-case2b-invariants-1");
  EXPECT_EQ(j["reduced"]["tag"], "EulerLinearFirstOrder");
  EXPECT_TRUE(j["matches_printed"]);
}

TEST_F(Cli, PrintedChartIsReportedNotFailed) {
  const auto r = in_dir({"reduce", "case2b", "--chart", "canonical", "--generator", "1", "--as-printed"});
  EXPECT_EQ(r.code, cheng::cli::kOk);
  const auto j = report("reduce-case2b-canonical-1-as-printed");
  EXPECT_FALSE(j["passed"]);
  EXPECT_EQ(j["leftover"], json::array({"f"}));
  EXPECT_EQ(j["warnings"].size(), 1u);
}

TEST_F(Cli, ReduceSpaceDependent) {
  const auto r = in_dir({"reduce", "space-dep", "--c", "x"});
  EXPECT_EQ(r.code, cheng::cli::kOk);
  const auto j = report("reduce-space-dep");
  EXPECT_FALSE(j["as_printed"]["passed"]);
  EXPECT_TRUE(j["derived"]["passed"]);
  EXPECT_TRUE(j["elimination"]["matches_ab"]);
}

TEST_F(Cli, GeneralSecondVariantNeedsLinearH) {
  EXPECT_EQ(in_dir({"reduce", "general-II", "--h", "t^2"}).code, cheng::cli::kUsage);
}

TEST_F(Cli, RiccatiCheck) {
  const auto r = in_dir({"solve", "riccati", "--check"});
  EXPECT_EQ(r.code, cheng::cli::kOk);
  const auto j = report("solve-riccati");
  EXPECT_LT(j["max_deviation"].get<double>(), 1e-8);
  EXPECT_EQ(j["interval"], json::array({1.0, 5.0}));
  EXPECT_TRUE(fs::exists(dir_ / "solve-riccati.csv"));
}

TEST_F(Cli, TravellingReports) {
  EXPECT_EQ(in_dir({"solve", "travelling", "--form", "derived", "--report"}).code, cheng::cli::kOk);
  EXPECT_LT(report("solve-travelling")["residuals"]["max"].get<double>(), 1e-10);
  const auto r = in_dir({"solve", "travelling", "--form", "paper", "--c", "2", "--report"});
  EXPECT_EQ(r.code, cheng::cli::kOk);
  const auto j = report("solve-travelling");
  EXPECT_EQ(j["residuals"]["source"], "travelling (paper)");
  EXPECT_FALSE(j["warnings"].empty());
}

TEST_F(Cli, PrintedGeneralFormIsAWarning) {
  const auto r = in_dir({"solve", "general", "--form", "paper", "--report", "--nt", "11", "--nx", "11"});
  EXPECT_EQ(r.code, cheng::cli::kOk);
  const auto j = report("solve-general");
  EXPECT_FALSE(j["passed"]);
  EXPECT_FALSE(j["warnings"].empty());
}

TEST_F(Cli, ConstantFieldsAndFailures) {
  EXPECT_EQ(in_dir({"report", "fields", "--u", "0", "--v", "7"}).code, cheng::cli::kOk);
  EXPECT_EQ(report("report-fields")["residuals"]["max"], 0.0);
  EXPECT_EQ(in_dir({"report", "fields", "--u", "x", "--v", "1"}).code, cheng::cli::kFailed);
  EXPECT_EQ(in_dir({"report", "fields", "--u", "x"}).code, cheng::cli::kUsage);
  EXPECT_EQ(in_dir({"report", "fields", "--u", "1/(x - t)", "--v", "0", "--t0", "1", "--t1", "1.0001", "--x0-grid",
                    "1", "--x1-grid", "1.0001", "--nt", "5", "--nx", "5", "--margin", "0.1"})
                .code,
            cheng::cli::kIndeterminate);
}

TEST_F(Cli, GroupFlowReport) {
  const auto r = in_dir({"report", "travelling", "--flow", "Gamma2A", "--eps", "-0.5"});
  EXPECT_EQ(r.code, cheng::cli::kOk) << r.out << r.err;
  const auto j = report("report-travelling-Gamma2A");
  EXPECT_EQ(j["flow"]["generator"], "d/dt");
  EXPECT_LT(j["residuals"]["max"].get<double>(), 1e-10);
}

TEST_F(Cli, ConfigFileAndPrecedence) {
  fs::create_directories(dir_);
  const auto cfg = dir_ / "run.json";
  std::ofstream(cfg) << R"({"a": 2, "c": "3", "nt": 11, "nx": 11, "report": true})";
  EXPECT_EQ(in_dir({"solve", "travelling", "--config", cfg.string(), "--b", "0.5"}).code, cheng::cli::kOk);
  const auto j = report("solve-travelling");
  EXPECT_EQ(j["parameters"]["a"], 2.0);
  EXPECT_EQ(j["parameters"]["b"], 0.5);
  EXPECT_EQ(j["parameters"]["c"], "3");
  EXPECT_EQ(j["grid"]["t"]["count"], 11);
  EXPECT_EQ(in_dir({"solve", "travelling", "--config", cfg.string(), "--a", "1"}).code, cheng::cli::kOk);
  EXPECT_EQ(report("solve-travelling")["parameters"]["a"], 1.0);

  std::ofstream(cfg) << R"({"speed": 2})";
  EXPECT_EQ(in_dir({"solve", "travelling", "--config", cfg.string()}).code, cheng::cli::kUsage);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
  ::setenv(cheng::cli::kOutputDirVariable, dir_.c_str(), 1);
  const auto r = invoke({"solve", "euler", "--check", "--format", "json"});
  ::unsetenv(cheng::cli::kOutputDirVariable);
  EXPECT_EQ(r.code, cheng::cli::kOk);
  EXPECT_TRUE(fs::exists(dir_ / "solve-euler-travelling.json"));
  EXPECT_FALSE(fs::exists(dir_ / "solve-euler-travelling.csv"));
  for (const auto& e : fs::directory_iterator(dir_)) {
    EXPECT_EQ(e.path().string().find(".tmp"), std::string::npos) << e.path();
  }
}

TEST_F(Cli, IdenticalRunsGiveIdenticalReports) {
  const std::vector<std::vector<std::string>> suite{
      {"verify-symmetries"}, {"reduce", "case2a"}, {"solve", "abel", "--equation", "scaling-canonical"},
      {"solve", "travelling", "--report", "--nt", "21", "--nx", "21"}};
  std::vector<std::string> first;
  for (const auto& args : suite) {
    in_dir(args);
  }
  for (const auto& e : fs::directory_iterator(dir_)) first.push_back(slurp(e.path()));
  for (const auto& args : suite) in_dir(args);
  std::size_t k = 0;
  for (const auto& e : fs::directory_iterator(dir_)) EXPECT_EQ(slurp(e.path()), first[k++]) << e.path();
}
