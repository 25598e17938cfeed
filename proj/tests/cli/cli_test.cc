#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::json;

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome Cli(const std::string& args) {
  const std::string cmd = std::string("\"") + KAMFORGE_CLI_PATH + "\" " + args + " 2>&1";
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return o;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), n);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int CountLines(const std::string& s) {
  int n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("kamforge_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }
  std::string Out(const std::string& sub) const { return (dir_ / sub).string(); }

  fs::path dir_;
};

TEST_F(CliTest, ZeroEpsilonConvergesInOneRow) {
  const std::string cfg =
      Config("c.json", R"({"schema_version": 1, "model": "standard", "epsilon": 0})");
  const Outcome o = Cli("run --config " + cfg + " --out " + Out("run"));
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NE(o.out.find("status converged"), std::string::npos) << o.out;
  // Header plus one row.
  EXPECT_EQ(CountLines(Slurp(dir_ / "run" / "steps.csv")), 2);
}

TEST_F(CliTest, StandardFamilyKeepsFrequency) {
  const std::string cfg =
      Config("c.json", R"({"schema_version": 1, "model": "standard", "epsilon": 1e-4})");
  const Outcome o = Cli("run --config " + cfg + " --out " + Out("run"));
  ASSERT_EQ(o.code, 0) << o.out;
  const Json rec = Json::parse(Slurp(dir_ / "run" / "result.json"));
  EXPECT_EQ(rec.at("status"), "converged");
  EXPECT_LE(rec.at("frequency_residual").get<double>(), 1e-9);

  const Outcome v = Cli("verify residual --result " + Out("run/result.json"));
  EXPECT_EQ(v.code, 0) << v.out;
  const Json vr = Json::parse(v.out);
  EXPECT_LE(vr.at("conjugacy_residual").get<double>(), 1e-10);
}

TEST_F(CliTest, LargeEpsilonIsControlledDivergence) {
  const std::string cfg =
      Config("c.json", R"({"schema_version": 1, "model": "standard", "epsilon": 1.5})");
  const Outcome o = Cli("run --config " + cfg + " --out " + Out("run"));
  EXPECT_EQ(o.code, 2) << o.out;
  EXPECT_NE(o.out.find("status diverged"), std::string::npos) << o.out;
  const Json report = Json::parse(Slurp(dir_ / "run" / "report.json"));
  EXPECT_EQ(report.at("status"), "diverged");
  EXPECT_NE(report.at("diagnostic").get<std::string>().find("DivergenceDetected"),
            std::string::npos);
}

TEST_F(CliTest, MaxStepsFlagStopsEarly) {
  const std::string cfg =
      Config("c.json", R"({"schema_version": 1, "model": "standard", "epsilon": 0.1})");
  const Outcome o = Cli("run --config " + cfg + " --out " + Out("run") + " --max-steps 1");
  EXPECT_EQ(o.code, 2) << o.out;
  EXPECT_NE(o.out.find("status max_steps"), std::string::npos) << o.out;
}

TEST_F(CliTest, ConfigErrorsExitOne) {
  const std::string cfg = Config("c.json", "{\"schema_version\": 1,\n\"model\": \"standard\",\n"
                                           "\"epsilon\": \"big\"}");
  const Outcome o = Cli("run --config " + cfg + " --out " + Out("run"));
  EXPECT_EQ(o.code, 1);
  EXPECT_NE(o.out.find("c.json:3: epsilon:"), std::string::npos) << o.out;
  EXPECT_EQ(Cli("run --config " + Out("missing.json")).code, 1);
  EXPECT_EQ(Cli("frobnicate").code, 1);
}

TEST_F(CliTest, FrequencyModelCannotRun) {
  const std::string cfg = Config("c.json", R"({"schema_version": 1, "model": "cubic"})");
  EXPECT_EQ(Cli("run --config " + cfg + " --out " + Out("run")).code, 1);
}

TEST_F(CliTest, RunsAreByteIdentical) {
  const std::string cfg =
      Config("c.json", R"({"schema_version": 1, "model": "rotation_2d", "epsilon": 1e-4})");
  ASSERT_EQ(Cli("run --config " + cfg + " --out " + Out("a")).code, 0);
  ASSERT_EQ(Cli("run --config " + cfg + " --out " + Out("b")).code, 0);
  for (const char* f : {"steps.csv", "ledger.csv", "report.csv", "result.json"}) {
    EXPECT_EQ(Slurp(dir_ / "a" / f), Slurp(dir_ / "b" / f)) << f;
  }
}

TEST_F(CliTest, SweepWritesOneDirectoryPerValue) {
  const std::string cfg = Config("c.json", R"({"schema_version": 1, "model": "twist_drift"})");
  const Outcome o = Cli("sweep --config " + cfg + " --out " + Out("sw") +
                        " --sweep eps=1e-6..1e-4:geometric:3");
  ASSERT_EQ(o.code, 0) << o.out;
  const std::string csv = Slurp(dir_ / "sw" / "sweep.csv");
  EXPECT_EQ(CountLines(csv), 4);
  EXPECT_EQ(csv, o.out);
  for (const char* d : {"run_000", "run_001", "run_002"}) {
    EXPECT_TRUE(fs::exists(dir_ / "sw" / d / "result.json")) << d;
  }
  // The same sweep through run --sweep gives the same table.
  const Outcome again = Cli("run --config " + cfg + " --out " + Out("sw2") +
                            " --sweep eps=1e-6..1e-4:geometric:3");
  EXPECT_EQ(again.out, o.out);
}

TEST_F(CliTest, VerifyDiophantine) {
  const Outcome ok = Cli("verify diophantine --omega golden --tau 1.5 --gamma 1.0 --kmax 50");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_TRUE(Json::parse(ok.out).at("satisfied").get<bool>());
  // A rational rotation has a zero divisor.
  const Outcome bad = Cli("verify diophantine --omega 0.5 --period one --gamma 0.1");
  EXPECT_EQ(bad.code, 2) << bad.out;
}

TEST_F(CliTest, VerifyDegree) {
  const Outcome cubic = Cli("verify degree --map cubic --p 0.0");
  EXPECT_EQ(cubic.code, 0) << cubic.out;
  EXPECT_EQ(Json::parse(cubic.out).at("degree").get<int>(), 1);
  const Outcome sq = Cli("verify degree --map complex_square --p 0.1,0");
  EXPECT_EQ(sq.code, 0) << sq.out;
  EXPECT_EQ(Json::parse(sq.out).at("degree").get<int>(), 2);
}

TEST_F(CliTest, VerifyRotation) {
  const Outcome o = Cli("verify rotation --map standard --eps 0 --r 0.3 --expect 0.3");
  EXPECT_EQ(o.code, 0) << o.out;
  EXPECT_NEAR(Json::parse(o.out).at("rotation").get<double>(), 0.3, 1e-12);
  const Outcome off = Cli("verify rotation --map standard --eps 0 --r 0.3 --expect 0.4");
  EXPECT_EQ(off.code, 2) << off.out;
}

TEST_F(CliTest, ShippedConfigsConverge) {
  int count = 0;
  for (const auto& entry : fs::directory_iterator(KAMFORGE_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const std::string name = entry.path().stem().string();
    const Outcome o = Cli("run --config " + entry.path().string() + " --out " + Out(name));
    EXPECT_EQ(o.code, 0) << name << "\n" << o.out;
    ++count;
  }
  EXPECT_GE(count, 5);
}

TEST_F(CliTest, CatalogListsModels) {
  const Outcome o = Cli("catalog list");
  EXPECT_EQ(o.code, 0);
  for (const char* name : {"standard", "twist_drift", "rotation_2d", "cubic", "line_1to2"}) {
    EXPECT_NE(o.out.find(name), std::string::npos) << name;
  }
}

}  // namespace
