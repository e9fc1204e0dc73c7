#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fixture_spaces.hpp"
#include "llk/cli.hpp"
#include "llk/errors.hpp"

using namespace llk;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const fs::path kFixtures = LLK_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string parse_message(const std::string& text) {
  try {
    parse_space_file(text);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::parse);
    return e.what();
  }
  ADD_FAILURE() << "parsed without error";
  return {};
}

int tool(const std::string& args) {
  const std::string cmd = std::string(LLK_TOOL) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST(Parse, RejectsUnknownKinds) {
  EXPECT_NE(parse_message(R"({"kind": "bogus"})").find("$.kind"), std::string::npos);
  const std::string warp = R"({"kind": "suspension_request", "warping": {"kind": "sinh"},
    "base": {"labels": ["a"], "dist": [[0]]}, "t_grid": [0]})";
  EXPECT_NE(parse_message(warp).find("$.warping.kind"), std::string::npos);
  EXPECT_NE(parse_message("not json").find("invalid JSON"), std::string::npos);
}

TEST(Parse, NamesTheOffendingRow) {
  const std::string ragged = R"({"kind": "finite_causal", "labels": ["a", "b"],
    "tau": [[0, 1], [0]], "leq": [[1, 1], [0, 1]]})";
  EXPECT_NE(parse_message(ragged).find("$.tau[1]"), std::string::npos);
  const std::string badleq = R"({"kind": "finite_causal", "labels": ["a", "b"],
    "tau": [[0, 1], [0, 0]], "leq": [[1, 2], [0, 1]]})";
  EXPECT_NE(parse_message(badleq).find("$.leq[0][1]"), std::string::npos);
  const std::string dup = R"({"kind": "finite_causal", "labels": ["a", "a"],
    "tau": [[0, 1], [0, 0]], "leq": [[1, 1], [0, 1]]})";
  EXPECT_NE(parse_message(dup).find("$.labels[1]"), std::string::npos);
  const std::string missing = R"({"kind": "finite_causal", "labels": ["a"], "leq": [[1]]})";
  EXPECT_NE(parse_message(missing).find("$.tau"), std::string::npos);
}

TEST(Parse, RoundTripIsByteExact) {
  for (const auto& f : fixtures::space_fixtures()) {
    const std::string bytes = slurp(kFixtures / (f.name + ".json"));
    ASSERT_FALSE(bytes.empty()) << f.name;
    EXPECT_EQ(serialize_space_file(parse_space_file(bytes)), bytes) << f.name;
    EXPECT_EQ(serialize_space_file(f.file), bytes) << f.name;
  }
}

TEST(Parse, InfiniteTauSurvivesRoundTrip) {
  SpaceFile f;
  f.space = FiniteCausalSpace::sized(2);
  f.space.labels = {"a", "b"};
  f.space.leq = {1, 1, 0, 1};
  f.space.tau = {0.0, kInf, 0.0, 0.0};
  const SpaceFile g = parse_space_file(serialize_space_file(f));
  EXPECT_EQ(g.space.tau, f.space.tau);
  EXPECT_EQ(g.space.leq, f.space.leq);
}

TEST(Cli, GoldensAreByteIdenticalAcrossJobs) {
  for (const auto& c : fixtures::golden_cases()) {
    const std::string input = slurp(kFixtures / (c.fixture + ".json"));
    const std::string golden = slurp(kFixtures / "golden" / c.golden());
    for (int jobs : {1, 8}) {
      CliOptions opt;
      opt.jobs = jobs;
      EXPECT_EQ(run_command(c.command, input, opt).output, golden) << c.golden() << " jobs " << jobs;
    }
  }
}

TEST(Cli, ReportHeader) {
  const std::string input = slurp(kFixtures / "suspension_two_point.json");
  const CommandResult r = run_command("validate", input, {});
  const json rep = json::parse(r.output);
  EXPECT_EQ(rep["tool"], "llk");
  EXPECT_EQ(rep["command"], "validate");
  EXPECT_EQ(rep["input_sha256"], sha256_hex(input));
  EXPECT_EQ(rep["verdict"], "pass");
  EXPECT_FALSE(rep.contains("timings"));
  CliOptions timed;
  timed.timings = true;
  EXPECT_TRUE(json::parse(run_command("validate", input, timed).output).contains("timings"));
}

TEST(Cli, Sha256KnownAnswers) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Cli, SplitOnSuspensionPasses) {
  const json rep = json::parse(slurp(kFixtures / "golden" / "suspension_circle12.split.json"));
  EXPECT_EQ(rep["verdict"], "pass");
  EXPECT_TRUE(rep["splitting"].contains("residual"));
  EXPECT_EQ(rep["splitting"]["mismatches"], 0);
  EXPECT_EQ(rep["base_recovery"]["slice_points"], 12);
}

TEST(Cli, MyersListsOffendingPairsOnTallStrip) {
  const json rep = json::parse(slurp(kFixtures / "golden" / "flat_strip_h4.myers.json"));
  EXPECT_EQ(rep["verdict"], "fail");
  ASSERT_FALSE(rep["checks"][0]["violations"].empty());
  EXPECT_GT(rep["checks"][0]["violations"][0]["lhs"].get<double>(), kPi);
}

TEST(Cli, SuspendThenValidate) {
  const std::string request = slurp(kFixtures / "suspension_two_point.json");
  const CommandResult s = run_command("suspend", request, {});
  ASSERT_EQ(s.exit_code, 0);
  EXPECT_EQ(parse_space_file(s.output).kind, SpaceFile::Kind::finite_causal);
  const CommandResult v = run_command("validate", s.output, {});
  EXPECT_EQ(v.exit_code, 0);
  EXPECT_EQ(json::parse(v.output)["verdict"], "pass");
}

TEST(Cli, GridResamplesTheRequest) {
  CliOptions opt;
  opt.grid = 11;
  const json rep = json::parse(run_command("validate", slurp(kFixtures / "suspension_two_point.json"), opt).output);
  EXPECT_EQ(rep["space"]["points"], 22);
  EXPECT_EQ(rep["options"]["grid"], 11);
}

TEST(Cli, UsageAndParseErrorsExitTwo) {
  const std::string input = slurp(kFixtures / "suspension_two_point.json");
  EXPECT_EQ(run_command("frobnicate", input, {}).exit_code, 2);
  EXPECT_EQ(run_command("validate", "{", {}).exit_code, 2);
  CliOptions bad;
  bad.jobs = 0;
  EXPECT_EQ(run_command("validate", input, bad).exit_code, 2);
  const SpaceFile finite = parse_space_file(run_command("suspend", input, {}).output);
  EXPECT_EQ(run_command("suspend", serialize_space_file(finite), {}).exit_code, 2);
  const json rep = json::parse(run_command("validate", "{", {}).output);
  EXPECT_EQ(rep["verdict"], "error");
  EXPECT_EQ(rep["error"]["code"], "cli.parse");
}

TEST(Cli, ToolExitCodes) {
  const std::string fx = kFixtures.string();
  EXPECT_EQ(tool("validate --in " + fx + "/suspension_circle12.json"), 0);
  EXPECT_EQ(tool("curvature --in " + fx + "/flat_strip.json"), 1);
  EXPECT_EQ(tool("myers --in " + fx + "/flat_strip_h4.json"), 1);
  EXPECT_EQ(tool("validate --in " + fx + "/no_such_file.json"), 2);
  EXPECT_EQ(tool("frobnicate --in " + fx + "/suspension_circle12.json"), 2);
  EXPECT_EQ(tool("validate"), 2);
  EXPECT_EQ(tool("validate --in " + fx + "/suspension_circle12.json --jobs 0"), 2);
}

TEST(Cli, ToolWritesTheGolden) {
  const fs::path out = fs::temp_directory_path() / "llk_cli_test_report.json";
  ASSERT_EQ(tool("myers --in " + (kFixtures / "ads_diamond_11.json").string() + " --out " + out.string() + " --jobs 4"), 0);
  EXPECT_EQ(slurp(out), slurp(kFixtures / "golden" / "ads_diamond_11.myers.json"));
  fs::remove(out);
}

TEST(Geodesics, CsvTable) {
  const std::string csv = run_command("geodesics", slurp(kFixtures / "geodesics.json"), {}).output;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "curve_id,lambda,t,x");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string id, lam, t, x;
    std::getline(row, id, ',');
    std::getline(row, lam, ',');
    std::getline(row, t, ',');
    std::getline(row, x, ',');
    ++rows;
    if (id == "0") {
      // Vertical geodesic: t = lambda, x = 0.
      EXPECT_NEAR(std::stod(t), std::stod(lam), 1e-12);
      EXPECT_EQ(std::stod(x), 0.0);
    }
    EXPECT_LT(std::abs(std::stod(t)), kPi / 2);
  }
  EXPECT_GT(rows, 100u);
}

TEST(Geodesics, BadRequests) {
  EXPECT_EQ(run_command("geodesics", R"({"curves": [{"omega": 0.5}]})", {}).exit_code, 2);
  CliOptions opt;
  opt.step = -1.0;
  EXPECT_EQ(run_command("geodesics", slurp(kFixtures / "geodesics.json"), opt).exit_code, 2);
}
