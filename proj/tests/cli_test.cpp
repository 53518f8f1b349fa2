#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, bool merge_stderr = false) {
  const std::string cmd = std::string(DIRDEP_CLI_PATH) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t k = fread(buf, 1, sizeof buf, p)) out.append(buf, k);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("dirdep_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, DatasetsListing) {
  const auto r = run("datasets");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("bloodpressure"), std::string::npos);
  EXPECT_NE(r.out.find("wind"), std::string::npos);
}

TEST(Cli, ExportBloodPressureFirstRow) {
  const auto r = run("datasets --export bloodpressure");
  EXPECT_EQ(r.code, 0);
  std::istringstream ss(r.out);
  std::string header, first;
  std::getline(ss, header);
  std::getline(ss, first);
  EXPECT_EQ(first, "30,25");
}

TEST(Cli, ExportWindHasTwentyOneRows) {
  const auto r = run("datasets --export wind");
  EXPECT_EQ(r.code, 0);
  int lines = 0;
  for (char c : r.out) lines += c == '\n';
  EXPECT_EQ(lines, 22);
}

TEST(Cli, RockExplainsExternalIngestion) {
  const auto r = run("datasets --export rock", true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("--x-type sphere"), std::string::npos) << r.out;
}

TEST(Cli, UnknownDatasetFails) {
  EXPECT_EQ(run("datasets --export nosuch").code, 1);
  EXPECT_EQ(run("test --dataset nosuch").code, 1);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("test --dataset wind --bogus-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("test --dataset wind -B 0").code, 2);
  EXPECT_EQ(run("test --dataset wind --kernel energy:3").code, 2);
  EXPECT_EQ(run("test --data x.csv").code, 2);
}

TEST(Cli, MissingConfigExitsTwoAndNamesPath) {
  const auto r = run("power --config /no/such/file.cfg", true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("/no/such/file.cfg"), std::string::npos) << r.out;
}

TEST(Cli, ConfigSchemaViolationListsField) {
  const auto cfg = scratch("bad.cfg");
  std::ofstream(cfg) << R"j({"statistics":["dcor"],"scenarios":[{"model":"BvM(1)","sample_size":5}]})j";
  const auto r = run("power --config " + cfg.string(), true);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("scenarios[0].sample_size"), std::string::npos) << r.out;
}

TEST(Cli, BloodPressureAllKernelStatisticsReject) {
  const auto r = run("test --dataset bloodpressure --battery kernel -B 5000 --json");
  ASSERT_EQ(r.code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["n"], 10);
  ASSERT_EQ(doc["results"].size(), 9u);
  for (const auto& res : doc["results"]) EXPECT_LE(res["p_value"].get<double>(), 0.001) << res;
}

TEST(Cli, TextOutputShowsExactFraction) {
  const auto r = run("test --dataset wind --stat dcor --kernel energy:0.5 -B 2000 --seed 3");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("/2001)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("D0.5"), std::string::npos);
}

TEST(Cli, ExportThenIngestGivesSameStatistic) {
  const auto csv = scratch("wind.csv");
  ASSERT_EQ(run("datasets --export wind --out " + csv.string()).code, 0);
  const auto a = nlohmann::json::parse(run("test --dataset wind --stat trig --stat ccor --stat dcor:log -B 50 --json").out);
  const auto b = nlohmann::json::parse(
      run("test --data " + csv.string() + " --x-type circular-deg --y-type circular-deg --stat trig --stat ccor --stat dcor:log -B 50 --json").out);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(a["results"][k]["value"].get<double>(), b["results"][k]["value"].get<double>(), 1e-12);
    EXPECT_EQ(a["results"][k]["p_value"], b["results"][k]["p_value"]);
  }
}

TEST(Cli, RadiansAndExplicitColumns) {
  const auto csv = scratch("rad.csv");
  std::ofstream(csv) << "id,th,z\n1,0.1,2.0\n2,1.2,1.0\n3,2.9,0.5\n4,4.0,3.3\n5,5.5,2.2\n6,0.7,0.1\n";
  const auto r = run("test --data " + csv.string() + " --x-type circular-rad --y-type linear --x-cols th --y-cols z -B 99 --json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(nlohmann::json::parse(r.out)["n"], 6);
}

TEST(Cli, SphericalDataAndRenormalize) {
  const auto csv = scratch("sph.csv");
  std::ofstream(csv) << "x1,x2,x3,y\n1,0,0,0.5\n0,2,0,1.5\n0,0,1,2.5\n0.6,0.8,0,0.1\n0,0.6,0.8,3\n";
  EXPECT_EQ(run("test --data " + csv.string() + " --x-type sphere --y-type linear -B 9").code, 1);
  const auto r = run("test --data " + csv.string() + " --x-type sphere --y-type linear --renormalize -B 9", true);
  EXPECT_EQ(r.code, 0) << r.out;
}

TEST(Cli, BadDataRowIsNamed) {
  const auto csv = scratch("broken.csv");
  std::ofstream(csv) << "a,b\n1,2\n3,4\n5,oops\n";
  const auto r = run("test --data " + csv.string() + " --x-type circular-deg --y-type circular-deg", true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("line 4"), std::string::npos) << r.out;
}

TEST(Cli, DegenerateMarginalExitsOne) {
  const auto csv = scratch("const.csv");
  std::ofstream(csv) << "a,b\n10,1\n10,2\n10,3\n10,4\n";
  const auto r = run("test --data " + csv.string() + " --x-type circular-deg --y-type circular-deg", true);
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("constant"), std::string::npos) << r.out;
}

TEST(Cli, PowerCsvIdenticalAcrossJobs) {
  const auto cfg = scratch("small.cfg");
  std::ofstream(cfg) << R"j({"name":"small","n":15,"N":40,"B":29,"seed":3,
    "statistics":["ccor","dcor:energy:1"],
    "scenarios":[{"model":"BvM(1)"},{"model":"Mix(VM(0,1),Unif,0.5)","mode":"warp_speed"}]})j";
  const auto a = scratch("a.csv"), b = scratch("b.csv");
  ASSERT_EQ(run("power --config " + cfg.string() + " --jobs 1 --out " + a.string()).code, 0);
  ASSERT_EQ(run("power --config " + cfg.string() + " --jobs 4 --out " + b.string()).code, 0);
  EXPECT_EQ(read_file(a), read_file(b));
  EXPECT_EQ(read_file(a).find("runtime"), std::string::npos);
}

TEST(Cli, PresetResolvedFromPresetDirectory) {
  const auto out = scratch("t7.csv");
  const auto r = run("power --config table7_desk.cfg --jobs 1 --out " + out.string(), true);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("runtime"), std::string::npos);
  EXPECT_NE(read_file(out).find("warp_speed"), std::string::npos);
}

TEST(Cli, JobsDefaultFromEnvironment) {
  const auto r = run("test --dataset wind -B 99 --json");
  setenv("DIRDEP_JOBS", "3", 1);
  const auto s = run("test --dataset wind -B 99 --json");
  unsetenv("DIRDEP_JOBS");
  EXPECT_EQ(r.out, s.out);
}
