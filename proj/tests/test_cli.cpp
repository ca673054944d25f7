#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "ktrack/dataio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int exit = -1;
  std::string out;
  std::string err;
};

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() /
                 ("ktrack_cli_" + std::to_string(::getpid()) + "_" + info->name());
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli(const std::string& args, const std::string& env = "") {
  const fs::path dir = scratch_dir();
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = env + " " + KTRACK_CLI + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#' && line.rfind("dataset,", 0) != 0) lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST(Cli, GenerateIsDeterministic) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(cli("generate --grid 20 --seed 1 --out " + (dir / "a.json").string()).exit, 0);
  ASSERT_EQ(cli("generate --grid 20 --seed 1 --out " + (dir / "b.json").string()).exit, 0);
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  const auto ds = ktrack::read_dataset(dir / "a.json");
  EXPECT_EQ(ds.num_points(), 20u);
  EXPECT_EQ(ds.provenance()["spec"]["seed"], 1);
}

TEST(Cli, RunPairGivesInferenceRatioSpeedup) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(cli("generate --grid 10 --seed 2 --out " + (dir / "d.json").string()).exit, 0);
  const std::string common = "run --dataset " + (dir / "d.json").string() + " --seed 2 ";
  ASSERT_EQ(cli(common + "--n 0 --out " + (dir / "base.csv").string()).exit, 0);
  ASSERT_EQ(cli(common + "--n 10 --out " + (dir / "n10.csv").string()).exit, 0);
  const auto base = ktrack::read_results(dir / "base.csv");
  const auto n10 = ktrack::read_results(dir / "n10.csv");
  ASSERT_EQ(base.rows.size(), 1u);
  ASSERT_EQ(n10.rows.size(), 1u);
  EXPECT_EQ(*base.rows[0].report->speedup, 1.0);
  EXPECT_NEAR(*n10.rows[0].report->speedup, 100.0 / 12.0, 1e-9);
  EXPECT_EQ(n10.config["n"], 10);
  EXPECT_EQ(n10.config["seed"], 2);
  EXPECT_EQ(n10.config["filter"]["sigmaM"], 0.3);
}

TEST(Cli, SweepIsByteIdenticalAcrossRuns) {
  const std::string args = "sweep --grid 8 --frames 50 --seed 3 --ns 0,2,5 "
                           "--predictors full-kalman,zero-order-hold";
  const Outcome a = cli(args), b = cli(args);
  ASSERT_EQ(a.exit, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(data_lines(a.out).size(), 6u);
  EXPECT_EQ(cli(args + " --serial").out, a.out);
}

TEST(Cli, SeedFallsBackToEnvironment) {
  const Outcome o = cli("sweep --grid 4 --frames 20 --ns 5", "KTRACK_SEED=77");
  ASSERT_EQ(o.exit, 0) << o.err;
  EXPECT_NE(o.out.find("\"seed\":77"), std::string::npos);
  EXPECT_EQ(cli("sweep --grid 4 --frames 20 --ns 5", "KTRACK_SEED=abc").exit, 2);
}

TEST(Cli, JsonFormat) {
  const Outcome o = cli("run --grid 5 --frames 30 --n 5 --format json");
  ASSERT_EQ(o.exit, 0) << o.err;
  const json j = json::parse(o.out);
  EXPECT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["config"]["command"], "run");
}

TEST(Cli, AblateRows) {
  const fs::path dir = scratch_dir();
  const Outcome o = cli("ablate --grid 20 --seed 5 --n 5 --out " + (dir / "abl.csv").string());
  ASSERT_EQ(o.exit, 0) << o.err;
  const auto t = ktrack::read_results(dir / "abl.csv");
  ASSERT_EQ(t.rows.size(), 12u);
  std::set<std::string> kinds;
  for (std::size_t i = 0; i < 6; ++i) kinds.insert(ktrack::text_column(t.rows[i], "predictor"));
  EXPECT_EQ(kinds.size(), 6u);
  std::vector<std::int64_t> warmups;
  for (std::size_t i = 6; i < 12; ++i) warmups.push_back(t.rows[i].cell.warmup);
  EXPECT_EQ(warmups, (std::vector<std::int64_t>{0, 1, 2, 3, 5, 10}));
  double fk = 0, zoh = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    if (t.rows[i].cell.kind == ktrack::PredictorKind::FullKalman) fk = t.rows[i].report->pck5();
    if (t.rows[i].cell.kind == ktrack::PredictorKind::ZeroOrderHold) zoh = t.rows[i].report->pck5();
  }
  EXPECT_GT(fk, zoh);
}

TEST(Cli, ReportEmitsChartPerMetric) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(cli("sweep --grid 6 --frames 40 --ns 0,2,5 --predictors full-kalman,linear-interpolation "
                   "--out " + (dir / "s.csv").string()).exit,
            0);
  const Outcome o = cli("report --results " + (dir / "s.csv").string() + " --out-dir " +
                           (dir / "charts").string());
  ASSERT_EQ(o.exit, 0) << o.err;
  for (const char* m : {"pck5", "epe", "aj", "retention", "speedup"}) {
    const std::string svg = slurp(dir / "charts" / (std::string(m) + ".svg"));
    EXPECT_NE(svg.find("<svg"), std::string::npos) << m;
    EXPECT_NE(svg.find("linear-interpolation"), std::string::npos) << m;
  }
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir();
  EXPECT_EQ(cli("").exit, 2);
  EXPECT_EQ(cli("run --n -1").exit, 2);
  EXPECT_EQ(cli("run --sigma-m 0").exit, 2);
  EXPECT_EQ(cli("run --tracker bogus").exit, 2);
  EXPECT_EQ(cli("run --tracker external:true --oracle-noise 2").exit, 2);
  EXPECT_EQ(cli("sweep --grid 4 --grids 4,5").exit, 2);

  std::ofstream(dir / "bad.json") << "{\"version\": 1}";
  const Outcome conflict = cli("run --dataset " + (dir / "bad.json").string() + " --motion circular");
  EXPECT_EQ(conflict.exit, 2);
  EXPECT_EQ(std::count(conflict.err.begin(), conflict.err.end(), '\n'), 1);

  EXPECT_EQ(cli("run --dataset " + (dir / "bad.json").string()).exit, 4);
  EXPECT_EQ(cli("run --grid 4 --frames 10 --predictor nope").exit, 3);
  EXPECT_EQ(cli("run --grid 4 --frames 10 --warmup 20").exit, 3);
  EXPECT_EQ(cli(std::string("run --grid 4 --frames 10 --tracker 'external:") + KTRACK_MOCK_ADAPTER +
                   " bad-version'")
                .exit,
            4);
}

TEST(Cli, ExternalTrackerRun) {
  const fs::path dir = scratch_dir();
  ASSERT_EQ(cli("generate --grid 6 --frames 40 --seed 9 --out " + (dir / "d.json").string()).exit, 0);
  const std::string ds = (dir / "d.json").string();
  const Outcome ext = cli("run --dataset " + ds + " --seed 9 --n 5 --tracker 'external:" +
                             KTRACK_MOCK_ADAPTER + " dataset " + ds + " 1.0 9'");
  const Outcome local = cli("run --dataset " + ds + " --seed 9 --n 5 --oracle-noise 1.0");
  ASSERT_EQ(ext.exit, 0) << ext.err;
  ASSERT_EQ(local.exit, 0) << local.err;
  auto metrics = [](const std::string& out) {
    const auto row = ktrack::parse_row(data_lines(out).at(0));
    return row.report->pck;
  };
  EXPECT_EQ(metrics(ext.out), metrics(local.out));
}
