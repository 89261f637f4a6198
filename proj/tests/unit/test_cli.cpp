// End-to-end runs of the kerrkit executable.
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "kerrkit/gram_cache.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliRun {
  int code = -1;
  std::string output;  // stdout and stderr
};

CliRun kerrkit(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + KERRKIT_BIN + std::string(" ") + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe) != nullptr) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("kerrkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  std::string out(const std::string& sub = "") const { return (dir_ / sub).string(); }
  fs::path dir_;
};

const char* kKcsSpec = R"('{"family":"KerrPhaseNeg","params":{"c":0.5,"lambda":-2,"j":1}}')";

TEST_F(Cli, GenDataMoons) {
  const CliRun r = kerrkit("--out " + out() + " --seed 7 gen-data moons --version v1");
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(line_count(dir_ / "moons-v1.csv"), 401u);
  const json manifest = json::parse(slurp(dir_ / "gen-data.manifest.json"));
  EXPECT_EQ(manifest.at("schema_version"), 1);
  EXPECT_EQ(manifest.at("command"), "gen-data");
}

TEST_F(Cli, GenDataDisksPreset) {
  ASSERT_EQ(kerrkit("--out " + out() + " gen-data disks --preset double").code, 0);
  EXPECT_EQ(line_count(dir_ / "disks-v1.csv"), 96u);
}

TEST_F(Cli, InvalidPresetIsUsageError) {
  const CliRun r = kerrkit("--out " + out() + " gen-data disks --preset quintuple");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.output.empty());
}

TEST_F(Cli, GramAuditAndWorkerDeterminism) {
  ASSERT_EQ(kerrkit("--out " + out() + " gen-data moons").code, 0);
  const std::string data = out("moons-v1.csv");
  const CliRun one = kerrkit("--out " + out("w1") + " gram --audit --data " + data + " --spec " + kKcsSpec);
  ASSERT_EQ(one.code, 0) << one.output;
  const CliRun four = kerrkit("--workers 4 --out " + out("w4") + " gram --audit --data " + data + " --spec " + kKcsSpec);
  ASSERT_EQ(four.code, 0) << four.output;
  EXPECT_EQ(kerrkit::file_sha256(out("w1/gram.kgrm")), kerrkit::file_sha256(out("w4/gram.kgrm")));
  EXPECT_EQ(kerrkit::read_gram_cache(out("w1/gram.kgrm")).rows(), 400);
  const json audit = json::parse(slurp(dir_ / "w1" / "gram.audit.json"));
  EXPECT_TRUE(audit.at("pass").get<bool>());
}

TEST_F(Cli, CorruptSpecNamesField) {
  ASSERT_EQ(kerrkit("--out " + out() + " gen-data moons").code, 0);
  const CliRun r = kerrkit("--out " + out() + " gram --data " + out("moons-v1.csv") +
                        R"( --spec '{"family":"KerrPhaseNeg","params":{"c":"x","lambda":-2,"j":1}}')");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("params.c"), std::string::npos) << r.output;
}

TEST_F(Cli, TrainReportsScores) {
  ASSERT_EQ(kerrkit("--out " + out() + " gen-data moons").code, 0);
  const CliRun r = kerrkit("--out " + out() + " train --c-reg 10 --data " + out("moons-v1.csv") + " --spec " + kKcsSpec);
  ASSERT_EQ(r.code, 0) << r.output;
  const json j = json::parse(slurp(dir_ / "train.json"));
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_GT(j.at("f1_test").get<double>(), 0.8);
  EXPECT_TRUE(j.contains("f1_train"));
}

TEST_F(Cli, MissingLabelsColumnIsRejected) {
  std::ofstream(dir_ / "bad.csv") << "f0,f1\n0.1,0.2\n0.3,0.4\n";
  const CliRun r = kerrkit("--out " + out() + " train --data " + out("bad.csv") + " --spec " + kKcsSpec);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("label"), std::string::npos) << r.output;
}

TEST_F(Cli, GridSearchTrace) {
  ASSERT_EQ(kerrkit("--out " + out() + " gen-data disks --preset double").code, 0);
  const CliRun r = kerrkit("--out " + out() + " grid-search --family ESS --c-reg 1 --data " + out("disks-v1.csv"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(line_count(dir_ / "trace.csv"), 21u);
  const json j = json::parse(slurp(dir_ / "grid_search.json"));
  EXPECT_EQ(j.at("schema_version"), 1);
}

TEST_F(Cli, VerifyQuickAndFaultInjection) {
  const CliRun ok = kerrkit("--out " + out("ok") + " verify --quiet --group fock --group lattice");
  EXPECT_EQ(ok.code, 0) << ok.output;
  const json report = json::parse(slurp(dir_ / "ok" / "verify_report.json"));
  EXPECT_TRUE(report.at("pass").get<bool>());
  const CliRun bad = kerrkit("--out " + out("bad") + " verify --quiet --group fock --zeta0 lemma");
  EXPECT_EQ(bad.code, 2) << bad.output;
  EXPECT_TRUE(fs::exists(dir_ / "bad" / "verify.manifest.json"));
}

TEST_F(Cli, LatticeExports) {
  ASSERT_EQ(kerrkit("--out " + out() + " lattice --preset fig7-neg --z 0").code, 0);
  std::ifstream in(dir_ / "intensity.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(row.substr(0, 2), "0,");
  EXPECT_NEAR(std::stod(row.substr(2)), 1.0, 1e-12);
  const CliRun over = kerrkit("--out " + out() + " lattice --lambda 2 --j 5 --z 3 --n-guides 12");
  EXPECT_EQ(over.code, 1);
  EXPECT_NE(over.output.find("trunc"), std::string::npos) << over.output;
}

TEST_F(Cli, MissingArchiveIsExitThree) {
  const CliRun r = kerrkit("--out " + out() + " gen-data breastmnist --input " + out("nothing.npz"), "KERRKIT_DATA_DIR=");
  EXPECT_EQ(r.code, 3) << r.output;
}

TEST_F(Cli, ReplayReproducesOutputs) {
  ASSERT_EQ(kerrkit("--out " + out("a") + " --seed 11 gen-data circles --version v2").code, 0);
  const CliRun r = kerrkit("--replay " + out("a/gen-data.manifest.json") + " --out " + out("b"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(slurp(dir_ / "a" / "circles-v2.csv"), slurp(dir_ / "b" / "circles-v2.csv"));
  EXPECT_EQ(line_count(dir_ / "b" / "circles-v2.csv"), 861u);
}

TEST_F(Cli, ConfigFileSuppliesOptions) {
  std::ofstream(dir_ / "run.toml") << "seed = 3\n";
  ASSERT_EQ(kerrkit("--config " + out("run.toml") + " --out " + out("c") + " gen-data moons").code, 0);
  ASSERT_EQ(kerrkit("--seed 3 --out " + out("d") + " gen-data moons").code, 0);
  EXPECT_EQ(slurp(dir_ / "c" / "moons-v1.csv"), slurp(dir_ / "d" / "moons-v1.csv"));
  ASSERT_EQ(kerrkit("--seed 4 --out " + out("e") + " gen-data moons").code, 0);
  EXPECT_NE(slurp(dir_ / "c" / "moons-v1.csv"), slurp(dir_ / "e" / "moons-v1.csv"));
}

TEST_F(Cli, BenchMarksMissingArchiveSkipped) {
  const CliRun r = kerrkit("--out " + out() + " --format json bench --table 5", "KERRKIT_DATA_DIR=");
  ASSERT_EQ(r.code, 0) << r.output;
  const json j = json::parse(slurp(dir_ / "bench_table5.json"));
  EXPECT_EQ(j.at("schema_version"), 1);
  bool skipped = false;
  for (const auto& row : j.at("rows")) skipped = skipped || row.at("status") == "skipped";
  EXPECT_TRUE(skipped);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(kerrkit("").code, 1);
  EXPECT_EQ(kerrkit("frobnicate").code, 1);
  EXPECT_EQ(kerrkit("--help").code, 0);
  const CliRun v = kerrkit("--version");
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.output.find('.'), std::string::npos);
  EXPECT_EQ(kerrkit("--workers 0 gen-data moons --out " + out()).code, 1);
}

}  // namespace
