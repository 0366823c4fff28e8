#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

const fs::path kTmp = QMP_TEST_TMP;

int run(const std::string& args) {
  const std::string cmd = std::string(QMP_CLI_PATH) + " " + args + " > " + (kTmp / "stdout.txt").string() + " 2> " +
                          (kTmp / "stderr.txt").string();
  fs::create_directories(kTmp);
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh(const std::string& name) {
  const fs::path dir = kTmp / name;
  fs::remove_all(dir);
  return dir;
}

TEST(Cli, DensityTable) {
  EXPECT_EQ(run("density --y 0.5 --points 11"), 0);
  EXPECT_FALSE(slurp(kTmp / "stdout.txt").empty());
}

TEST(Cli, SimulateWritesOutputs) {
  const fs::path out = fresh("simulate");
  EXPECT_EQ(run("simulate --p 10 --n 20 --reps 2 --seed 3 --out " + out.string()), 0);
  const std::string csv = slurp(out / "eigenvalues.csv");
  EXPECT_EQ(csv.rfind("replication,index,lambda\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 2 * 10);
  const auto report = nlohmann::json::parse(slurp(out / "report.json"));
  EXPECT_EQ(report["schema"], 1);
  EXPECT_EQ(report["per_replication"].size(), 2u);
  EXPECT_TRUE(fs::exists(out / "histogram.svg"));
}

TEST(Cli, FormatFlagLimitsOutputs) {
  const fs::path out = fresh("format");
  EXPECT_EQ(run("simulate --p 4 --n 8 --format csv --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "eigenvalues.csv"));
  EXPECT_FALSE(fs::exists(out / "report.json"));
}

TEST(Cli, StudentTWithPipeline) {
  EXPECT_EQ(run("simulate --p 8 --n 16 --dist student-t --df 3 --eta 0.5"), 0);
}

TEST(Cli, ValidationFailures) {
  EXPECT_EQ(run("simulate --p 4 --n 8 --z-grid 1+0i"), 2);
  EXPECT_EQ(run("simulate --p 4 --n 8 --z-grid nonsense"), 2);
  EXPECT_EQ(run("simulate --p 4 --n 8 --dist student-t --df 2"), 2);
  EXPECT_EQ(run("simulate --p 0 --n 8"), 2);
  EXPECT_EQ(run("simulate --dist cauchy"), 2);
  EXPECT_EQ(run("sweep --sizes 5x10,10x19"), 2);
  EXPECT_EQ(run("density --y -1"), 2);
}

TEST(Cli, UnwritableOutputIsIoError) {
  const fs::path blocker = fresh("blocker");
  std::ofstream(blocker) << "x";
  EXPECT_EQ(run("simulate --p 2 --n 2 --out " + (blocker / "sub").string()), 4);
}

TEST(Cli, CheckStructure) { EXPECT_EQ(run("check-structure --count 20 --seed 4"), 0); }

TEST(Cli, Stieltjes) {
  EXPECT_EQ(run("stieltjes --p 10 --n 20 --z-grid 0+1i,1+0.5i"), 0);
  const std::string table = slurp(kTmp / "stdout.txt");
  EXPECT_EQ(table.rfind("re_z,im_z,re_m,im_m,re_mn,im_mn,abs_diff\n", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  EXPECT_EQ(run("stieltjes --p 10 --n 20 --z-grid 0+1i,1-0.5i"), 2);
}

TEST(Cli, SweepWritesSummary) {
  const fs::path out = fresh("sweep");
  EXPECT_EQ(run("sweep --sizes 5x10,10x20 --reps 2 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "sweep_summary.csv"));
  EXPECT_TRUE(fs::exists(out / "p10_n20" / "eigenvalues.csv"));
}

TEST(Cli, ConfigFileWithOverride) {
  const fs::path out = fresh("config");
  fs::create_directories(out);
  std::ofstream(out / "cfg.json") << R"({"p": 6, "n": 12, "replications": 3, "seed": 5,
    "dist": {"kind": "signed-units", "sigma2": 2.0}})";
  EXPECT_EQ(run("simulate --config " + (out / "cfg.json").string() + " --reps 2 --out " + (out / "run").string()), 0);
  const auto report = nlohmann::json::parse(slurp(out / "run" / "report.json"));
  EXPECT_EQ(report["config"]["p"], 6);
  EXPECT_EQ(report["config"]["replications"], 2);
  EXPECT_EQ(report["config"]["dist"]["kind"], "signed-units");
  EXPECT_EQ(report["config"]["dist"]["sigma2"], 2.0);
  EXPECT_EQ(run("simulate --config " + (out / "missing.json").string()), 4);
}

TEST(Cli, SameSeedSameBytes) {
  const fs::path a = fresh("det_a"), b = fresh("det_b");
  ASSERT_EQ(run("simulate --p 8 --n 16 --reps 3 --seed 11 --out " + a.string()), 0);
  ASSERT_EQ(run("simulate --p 8 --n 16 --reps 3 --seed 11 --workers 1 --out " + b.string()), 0);
  EXPECT_EQ(slurp(a / "eigenvalues.csv"), slurp(b / "eigenvalues.csv"));
  EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
}

}  // namespace
