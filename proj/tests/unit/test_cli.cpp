#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "json.hpp"
#include "support/test_support.hpp"

using vote_audit::testing::fixture_path;
using Json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vote-audit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = vote_audit::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class TempDir {
public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("vote_audit_cli_" + std::to_string(::getpid()) + "_" +
                                         ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path operator/(const std::string& name) const { return path_ / name; }

private:
  fs::path path_;
};

std::set<std::string> keys(const Json& j) {
  std::set<std::string> k;
  for (auto it = j.begin(); it != j.end(); ++it) k.insert(it.key());
  return k;
}

}  // namespace

TEST(CliAnalyze, HumanReport) {
  const auto o = run_cli({"analyze", fixture_path()});
  ASSERT_EQ(o.code, 0) << o.err;
  for (const char* label : {"districts (N, M):   106, 11", "k_hat:", "sigma2_hat:", "var(k_hat):", "v_b (red):",
                            "m (red):            77769", "threshold V~:       49911 (34479 + 15432)",
                            "t statistic:", "degrees of freedom: 105", "p = P[V >= V~]:", "log10 p:"})
    EXPECT_NE(o.out.find(label), std::string::npos) << label;
}

TEST(CliAnalyze, JsonMatchesHumanValues) {
  const auto human = run_cli({"analyze", fixture_path(), "--include-dubious"});
  const auto js = run_cli({"analyze", fixture_path(), "--include-dubious", "--json"});
  ASSERT_EQ(js.code, 0);
  const auto j = Json::parse(js.out);
  EXPECT_EQ(j["command"], "analyze");
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_TRUE(j["error"].is_null());
  const auto& r = j["result"];
  EXPECT_EQ(r["n_green"], 103);
  EXPECT_EQ(r["n_red"], 14);
  EXPECT_EQ(r["dof"], 102);
  EXPECT_EQ(r["variant"], "red_and_dubious");
  EXPECT_NEAR(r["log10_p"].get<double>(), std::log10(r["p"].get<double>()), 1e-12);

  std::smatch m;
  ASSERT_TRUE(std::regex_search(human.out, m, std::regex(R"(p = P\[V >= V~\]:\s+(\S+))")));
  const double p_human = std::stod(m[1]);
  EXPECT_LE(vote_audit::testing::rel_err(p_human, r["p"].get<double>()), 1e-7);
  ASSERT_TRUE(std::regex_search(human.out, m, std::regex(R"(k_hat:\s+(\S+))")));
  EXPECT_LE(vote_audit::testing::rel_err(std::stod(m[1]), r["fit"]["k_hat"].get<double>()), 1e-7);
}

TEST(CliAnalyze, LevelAddsInterval) {
  const auto o = run_cli({"analyze", fixture_path(), "--json", "--level", "0.95"});
  ASSERT_EQ(o.code, 0);
  const auto iv = Json::parse(o.out)["result"]["interval"];
  EXPECT_EQ(iv["level"], 0.95);
  EXPECT_LT(iv["lower"].get<double>(), iv["upper"].get<double>());
  EXPECT_EQ(run_cli({"analyze", fixture_path(), "--level", "1.5"}).code, vote_audit::cli::kExitUsage);
}

TEST(CliAnalyze, MalformedCsvReportsLine) {
  TempDir dir;
  const auto bad = dir / "bad.csv";
  std::ofstream(bad) << "district_id,name,ballot_total,ballot_c1,mail_total,mail_c1,status\n"
                     << "a,A,10,5,20,8,green\n"
                     << "b,B,10,5,20,oops,green\n";
  const auto o = run_cli({"analyze", bad.string()});
  EXPECT_EQ(o.code, vote_audit::cli::kExitDataError);
  EXPECT_NE(o.err.find("line 3"), std::string::npos) << o.err;

  const auto j = run_cli({"analyze", bad.string(), "--json"});
  EXPECT_EQ(j.code, vote_audit::cli::kExitDataError);
  const auto doc = Json::parse(j.out);
  EXPECT_FALSE(doc["ok"].get<bool>());
  EXPECT_EQ(doc["error"]["kind"], "parse");
  EXPECT_EQ(doc["error"]["line"], 3);
  EXPECT_TRUE(doc["result"].is_null());
}

TEST(CliAnalyze, UsageErrors) {
  EXPECT_EQ(run_cli({}).code, vote_audit::cli::kExitUsage);
  EXPECT_EQ(run_cli({"analyze"}).code, vote_audit::cli::kExitUsage);
  EXPECT_EQ(run_cli({"frobnicate", fixture_path()}).code, vote_audit::cli::kExitUsage);
  EXPECT_EQ(run_cli({"analyze", fixture_path(), "--no-such-flag"}).code, vote_audit::cli::kExitUsage);
  EXPECT_EQ(run_cli({"analyze", "/nonexistent/file.csv"}).code, vote_audit::cli::kExitDataError);
}

TEST(CliScenario, DefaultReversesByOne) {
  const auto o = run_cli({"scenario", fixture_path()});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_NE(o.err.find("moved 15432 votes; resulting margin (candidate 1 - candidate 2): +1"), std::string::npos)
      << o.err;
  const auto modified = vote_audit::parse_dataset(o.out);
  EXPECT_EQ(modified.margin_official(), -1);
}

TEST(CliScenario, ZeroVotesIsIdentity) {
  const auto o = run_cli({"scenario", fixture_path(), "--votes", "0"});
  ASSERT_EQ(o.code, 0);
  EXPECT_EQ(o.out, read_file(fixture_path()));
  EXPECT_NE(o.err.find("-30863"), std::string::npos);
}

TEST(CliScenario, OutFileAndJson) {
  TempDir dir;
  const auto path = dir / "scenario.csv";
  const auto o = run_cli({"scenario", fixture_path(), "--out", path.string()});
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("+1"), std::string::npos);
  EXPECT_EQ(vote_audit::load_dataset(path.string()).margin_official(), -1);

  const auto j = Json::parse(run_cli({"scenario", fixture_path(), "--json"}).out);
  EXPECT_EQ(j["result"]["resulting_margin"], 1);
  EXPECT_EQ(j["result"]["moves"].size(), 11u);
  Json::number_integer_t sum = 0;
  for (const auto& v : j["result"]["moves"]) sum += v.get<Json::number_integer_t>();
  EXPECT_EQ(sum, 15432);
}

TEST(CliScenario, OversizedVotesNameShortfall) {
  const auto o = run_cli({"scenario", fixture_path(), "--votes", "1000000"});
  EXPECT_EQ(o.code, vote_audit::cli::kExitDataError);
  EXPECT_NE(o.err.find("shortfall"), std::string::npos) << o.err;
  EXPECT_EQ(run_cli({"scenario", fixture_path(), "--votes", "-3"}).code, vote_audit::cli::kExitUsage);
  EXPECT_EQ(run_cli({"scenario", fixture_path(), "--base", "ballots"}).code, vote_audit::cli::kExitUsage);
}

TEST(CliPlot, WritesSvg) {
  TempDir dir;
  const auto path = dir / "fig.svg";
  ASSERT_EQ(run_cli({"plot", fixture_path(), "--out", path.string()}).code, 0);
  const std::string svg = read_file(path);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  const auto scen = dir / "fig2.svg";
  const auto j = Json::parse(
      run_cli({"plot", fixture_path(), "--out", scen.string(), "--votes", "15432", "--include-dubious", "--json"}).out);
  EXPECT_EQ(j["result"]["green_points"], 103);
  EXPECT_EQ(j["result"]["red_points"], 14);
  EXPECT_NE(read_file(scen), svg);
  EXPECT_EQ(run_cli({"plot", fixture_path()}).code, vote_audit::cli::kExitUsage);
  EXPECT_EQ(run_cli({"plot", fixture_path(), "--out", (dir / "no/such/dir/x.svg").string()}).code,
            vote_audit::cli::kExitDataError);
}

TEST(CliCalibrate, ArgumentChecksAndDeterminism) {
  EXPECT_EQ(run_cli({"calibrate", fixture_path(), "--reps", "99"}).code, vote_audit::cli::kExitUsage);
  const auto a = run_cli({"calibrate", fixture_path(), "--reps", "300", "--seed", "5", "--json"});
  const auto b = run_cli({"calibrate", fixture_path(), "--reps", "300", "--seed", "5", "--json", "--threads", "3"});
  const auto c = run_cli({"calibrate", fixture_path(), "--reps", "300", "--seed", "6", "--json"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
  const auto j = Json::parse(a.out)["result"];
  EXPECT_EQ(j["t_stats"].size(), 300u);
  EXPECT_EQ(j["seed"], 5);
  EXPECT_EQ(j["quantile_errors"].size(), 5u);
  const auto human = run_cli({"calibrate", fixture_path(), "--reps", "300", "--seed", "5"});
  EXPECT_EQ(human.code, 0);
  EXPECT_EQ(human.out, run_cli({"calibrate", fixture_path(), "--reps", "300", "--seed", "5"}).out);
}

TEST(CliJson, SchemaStableAcrossCommandsAndRuns) {
  TempDir dir;
  const std::string svg = (dir / "p.svg").string();
  const std::vector<std::vector<std::string>> commands{
      {"analyze", fixture_path(), "--json"},
      {"scenario", fixture_path(), "--json"},
      {"plot", fixture_path(), "--json", "--out", svg},
      {"calibrate", fixture_path(), "--json", "--reps", "100"},
      {"validate", fixture_path(), "--json"},
  };
  const std::set<std::string> envelope{"command", "ok", "result", "error"};
  for (const auto& cmd : commands) {
    const auto first = Json::parse(run_cli(cmd).out);
    const auto second = Json::parse(run_cli(cmd).out);
    EXPECT_EQ(keys(first), envelope) << cmd[0];
    EXPECT_EQ(first["command"], cmd[0]);
    EXPECT_EQ(keys(first["result"]), keys(second["result"])) << cmd[0];
    EXPECT_EQ(first, second) << cmd[0];
  }
  // error envelopes share the same top-level keys and error fields
  const auto err = Json::parse(run_cli({"validate", "/nonexistent.csv", "--json"}).out);
  EXPECT_EQ(keys(err), envelope);
  EXPECT_EQ(keys(err["error"]), (std::set<std::string>{"kind", "message", "line"}));
}

TEST(CliValidate, Counts) {
  const auto o = run_cli({"validate", fixture_path()});
  ASSERT_EQ(o.code, 0);
  EXPECT_NE(o.out.find("117 districts (103 green, 11 red, 3 dubious)"), std::string::npos) << o.out;
  const auto j = Json::parse(run_cli({"validate", fixture_path(), "--json"}).out)["result"];
  EXPECT_EQ(j["margin_official"], 30863);
}
