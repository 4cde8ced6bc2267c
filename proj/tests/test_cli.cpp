#include <gtest/gtest.h>
#include <json.hpp>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "alphacf/tree.hpp"

namespace fs = std::filesystem;
using namespace alphacf;

namespace {

fs::path scratch() {
  fs::path d = fs::temp_directory_path() / ("alphacf_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d;
}

int run(const std::string& args, const fs::path& stdout_to = {}) {
  std::string cmd = std::string(ALPHACF_CLI_PATH) + " " + args;
  cmd += stdout_to.empty() ? " >/dev/null" : " >" + stdout_to.string();
  cmd += " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

// non-comment lines, header first
std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string s; std::getline(in, s);)
    if (!s.empty() && s[0] != '#') out.push_back(s);
  return out;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string s;
  std::getline(in, s);
  return s;
}

std::string quoted(const std::string& s) { return s.find(',') == std::string::npos ? s : "\"" + s + "\""; }

}  // namespace

TEST(Cli, TreeDepth4GapsMatchLibrary) {
  const fs::path d = scratch();
  ASSERT_EQ(run("tree --depth 4 --out " + (d / "t").string()), 0);
  auto gaps = lines(d / "t_gaps.csv");
  ASSERT_FALSE(gaps.empty());
  EXPECT_EQ(gaps[0], "level,is_point,lo,hi,label_lo,label_hi");
  std::vector<std::string> want;
  for (const auto& level : generate_tree(4).levels)
    for (const auto& g : level)
      want.push_back(std::to_string(g.level) + "," + (g.is_point ? "1" : "0") + "," + g.interval.lo.to_string() +
                     "," + g.interval.hi.to_string() + "," + quoted(format_endpoint(g.label_lo)) + "," +
                     quoted(format_endpoint(g.label_hi)));
  ASSERT_EQ(gaps.size(), want.size() + 1);
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_EQ(gaps[i + 1], want[i]);
  EXPECT_NE(std::find(gaps.begin(), gaps.end(),
                      "2,0,(-1+1*sqrt(3))/2,(-1+1*sqrt(2))/1,\"[0;(2,1)^inf]\",[0;(2)^inf]"),
            gaps.end());
  // seven tree intervals plus the rightmost one
  EXPECT_EQ(lines(d / "t_intervals.csv").size(), 9u);
  EXPECT_EQ(first_line(d / "t_intervals.csv"), "# alphacf tree depth=4 out=" + (d / "t").string() +
                                                   " format=csv threads=" + std::to_string(default_threads()));
}

TEST(Cli, TreeDepthZero) {
  const fs::path d = scratch();
  ASSERT_EQ(run("tree --depth 0 --out " + (d / "z").string()), 0);
  auto gaps = lines(d / "z_gaps.csv");
  ASSERT_EQ(gaps.size(), 2u);
  EXPECT_EQ(gaps[1], "0,0,(0+0*sqrt(0))/1,(-1+1*sqrt(5))/2,0,[0;(1)^inf]");
}

TEST(Cli, TreeJson) {
  const fs::path d = scratch();
  ASSERT_EQ(run("tree --depth 3 --format json --out " + (d / "j").string()), 0);
  std::ifstream in(d / "j_intervals.json");
  auto doc = nlohmann::json::parse(in);
  ASSERT_EQ(doc["rows"].size(), 5u);
  EXPECT_EQ(doc["summary"]["intervals"], 5);
  EXPECT_LT(doc["rows"][0]["lo_decimal"].get<double>(), doc["rows"][4]["lo_decimal"].get<double>());
  EXPECT_EQ(doc["rows"][4]["hi"], "(1+0*sqrt(0))/1");
}

TEST(Cli, EntropyGridOne) {
  const fs::path d = scratch();
  ASSERT_EQ(run("entropy --window 0.4,0.41 --grid 1 --iters 500 --samples 20 --out " + (d / "e.csv").string()), 0);
  auto rows = lines(d / "e.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], "alpha,mean,std,N,M,epsilon,seed");
  EXPECT_EQ(rows[1].rfind("0.4", 0), 0u);
  // same seed, same file
  ASSERT_EQ(run("entropy --window 0.4,0.41 --grid 1 --iters 500 --samples 20 --out " + (d / "f.csv").string()), 0);
  EXPECT_EQ(lines(d / "f.csv"), rows);
}

TEST(Cli, ChainSixLinks) {
  const fs::path d = scratch();
  ASSERT_EQ(run("chain --levels 6", d / "c.csv"), 0);
  auto rows = lines(d / "c.csv");
  ASSERT_EQ(rows.size(), 7u);
  const char* ks[] = {"2,2", "3,3", "5,5", "9,9", "17,17", "33,33"};
  for (int n = 0; n < 6; ++n) EXPECT_EQ(rows[n + 1].rfind(std::to_string(n + 1) + "," + ks[n] + ",", 0), 0u) << n;
  std::ifstream in(d / "c.csv");
  std::stringstream all;
  all << in.rdbuf();
  EXPECT_NE(all.str().find("# cluster_point=0.38674997071430070617"), std::string::npos);
}

TEST(Cli, ScanDeduplicates) {
  const fs::path d = scratch();
  ASSERT_EQ(run("scan --window 0.42,0.6 --seeds 50", d / "s.csv"), 0);
  auto rows = lines(d / "s.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].rfind("(-1+1*sqrt(2))/1,(-1+1*sqrt(5))/2,", 0), 0u);
  EXPECT_EQ(rows[1].substr(rows[1].rfind(',') + 1), "50");
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("tree --bogus"), 1);
  EXPECT_EQ(run("tree --depth -1"), 1);
  EXPECT_EQ(run("entropy --window 0.5,0.4"), 1);
  EXPECT_EQ(run("entropy --window 0.4"), 1);
  EXPECT_EQ(run("entropy --window 0.4,0.5 --format xml"), 1);
  EXPECT_EQ(run("--help"), 0);
}
