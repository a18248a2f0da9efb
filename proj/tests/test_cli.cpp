#include "miblp/instance.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

using miblp::testing::data_path;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(MIBLP_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string result_line(const std::string& out) {
  std::istringstream in(out);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("RESULT ", 0) == 0) return line;
  }
  return {};
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("miblp_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

const std::string kMooreBard = data_path("moore_bard.miblp");
const std::string kThreeD = data_path("three_d.miblp");

}  // namespace

TEST(Cli, SolveBestConfigurationShape) {
  const CliRun r = cli("solve " + kMooreBard +
                    " --oracle id --direction-method local-search --k 2 --ls-depth-lb 10 --ls-depth-ub inf");
  ASSERT_EQ(r.code, 0) << r.out;
  const std::string rec = result_line(r.out);
  EXPECT_TRUE(contains(rec, "status=Optimal")) << rec;
  EXPECT_TRUE(contains(rec, "value=-22")) << rec;
  EXPECT_TRUE(contains(rec, "x=2 y=2")) << rec;
  EXPECT_TRUE(contains(r.out, "ifd time"));
}

TEST(Cli, SolveLegacyAndStableRecord) {
  const CliRun a = cli("solve " + kMooreBard + " --oracle legacy --seed 7");
  const CliRun b = cli("solve " + kMooreBard + " --oracle legacy --seed 7");
  ASSERT_EQ(a.code, 0) << a.out;
  EXPECT_TRUE(contains(result_line(a.out), "status=Optimal value=-22"));
  EXPECT_EQ(result_line(a.out), result_line(b.out));
}

TEST(Cli, SolveAcceptsCutListAndTrace) {
  const auto dir = scratch("trace");
  const CliRun r = cli("solve " + kThreeD + " --cuts idic,isic --branch linking --obj idic --trace " +
                    (dir / "t.log").string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(result_line(r.out), "value=-21"));
  EXPECT_GT(std::filesystem::file_size(dir / "t.log"), 0u);
}

TEST(Cli, ExitCodes) {
  CliRun r = cli("solve /nonexistent/x.miblp");
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(contains(r.out, "no such file"));
  EXPECT_EQ(cli("solve " + kMooreBard + " --k 2").code, 1);
  EXPECT_EQ(cli("solve " + kMooreBard + " --direction-method milp-k --ls-depth-lb 3").code, 1);
  EXPECT_EQ(cli("solve " + kMooreBard + " --direction-method local-search --ls-depth-ub many").code, 1);
  EXPECT_EQ(cli("solve " + kMooreBard + " --direction-method simplex").code, 1);
  EXPECT_EQ(cli("solve " + kMooreBard + " --cuts gomory").code, 1);
  EXPECT_EQ(cli("").code, 1);

  const auto dir = scratch("bad");
  std::ofstream(dir / "bad.miblp") << "MIBLP 1\nVARS 1 1 1\n";
  r = cli("solve " + (dir / "bad.miblp").string());
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(contains(r.out, "line 2"));
}

TEST(Cli, OracleReports) {
  CliRun r = cli("oracle " + kMooreBard + " --x 2 --y 4");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "outcome    Found"));
  EXPECT_TRUE(contains(r.out, "w          (-1)"));
  r = cli("oracle " + kMooreBard + " --x 1 --y 2.2");
  EXPECT_TRUE(contains(r.out, "NoImprovingDirection"));
  EXPECT_TRUE(contains(r.out, "in_S       no"));
  r = cli("oracle " + kMooreBard + " --x 2 --y 2");
  EXPECT_TRUE(contains(r.out, "NoImprovingDirection"));
  EXPECT_TRUE(contains(r.out, "bilevel feasible"));
  r = cli("oracle " + kThreeD + " --x 1 --y 3,2 --direction-method local-search --k 1");
  EXPECT_TRUE(contains(r.out, "HeuristicExhausted"));
  EXPECT_EQ(cli("oracle " + kMooreBard + " --x 2 --y 2,3").code, 1);
}

TEST(Cli, KoptListsRelaxedRegion) {
  CliRun r = cli("kopt " + kThreeD + " --k 4");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "(3,4,1) in F(4)\\F"));
  r = cli("kopt " + kThreeD + " --k 0");
  const std::regex size("\\|S\\| (\\d+)");
  std::smatch m;
  ASSERT_TRUE(std::regex_search(r.out, m, size));
  const long s = std::stol(m[1]);
  long points = 0;
  std::istringstream in(r.out);
  std::string line;
  while (std::getline(in, line)) points += line.rfind("(", 0) == 0;
  EXPECT_EQ(points, s);
  r = cli("kopt " + kThreeD + " --k 1 --slice x=1");
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "y1,y2,in_S,level");
  EXPECT_EQ(cli("kopt " + kThreeD + " --k 1 --slice 1").code, 1);
}

TEST(Cli, VerifyPasses) {
  const CliRun r = cli("verify " + kMooreBard);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(contains(r.out, "all checks passed"));
}

TEST(Cli, GenWritesParsableInstances) {
  const auto dir = scratch("gen");
  const auto path = (dir / "g.miblp").string();
  ASSERT_EQ(cli("gen --n1 2 --n2 2 --m2 3 --seed 4 -o " + path).code, 0);
  EXPECT_EQ(miblp::read_instance_file(path), miblp::generate_random_instance(4, {2, 2, 1, 3, -5, 5, 5}));
  const CliRun r = cli("gen --suite 3");
  EXPECT_EQ(miblp::parse_instance_string(r.out), miblp::suite_instance(3));
  EXPECT_EQ(cli("gen --suite 3 --n1 2").code, 1);
}

TEST(Cli, BenchThenProfile) {
  const auto dir = scratch("bench");
  CliRun r = cli("bench --generate 2 --time-limit 2 --threads 1 --configs baseline,idBC-MILP --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  ASSERT_TRUE(std::filesystem::exists(dir / "results.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "profile_cumulative_time_baseline.dat"));
  EXPECT_TRUE(std::filesystem::exists(dir / "profile_cumulative_gap_idBC-MILP.dat"));
  const auto out = dir / "profiles";
  r = cli("profile --results " + (dir / "results.csv").string() +
          " --measure nodes --baseline baseline --min-time 0 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(std::filesystem::exists(out / "profile_performance_nodes_idBC-MILP.dat"));
  EXPECT_TRUE(std::filesystem::exists(out / "profile_baseline_nodes_idBC-MILP.dat"));
  EXPECT_EQ(cli("profile --results " + (dir / "results.csv").string() + " --measure speed").code, 1);
  EXPECT_EQ(cli("bench --configs nope --generate 1 --out " + dir.string()).code, 1);
}
