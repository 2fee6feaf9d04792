#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pwsreg/cli/commands.hpp"

using namespace pwsreg;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "pwsreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST(Cli, ParseAssignment) {
  EXPECT_EQ(cli::parse_assignment("b=-0.1"), (std::pair<std::string, double>{"b", -0.1}));
  EXPECT_THROW((void)cli::parse_assignment("b"), PreconditionError);
  EXPECT_THROW((void)cli::parse_assignment("b=x"), PreconditionError);
  EXPECT_THROW((void)cli::parse_assignment("b=1x"), PreconditionError);
}

TEST(Cli, ClassifyCubic) {
  const auto r = run_cli({"classify", "--scenario", "type_b_cubic", "--from", "0", "--to", "1", "--step", "0.1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"x", "kind", "lie1+", "lie1-", "multiplicity", "visible"}));
  const std::vector<std::string> kinds{"tangency", "crossing", "crossing", "crossing", "crossing", "tangency",
                                       "sliding",  "crossing", "crossing", "crossing", "crossing"};
  for (std::size_t i = 0; i < kinds.size(); ++i) EXPECT_EQ(rows[i + 1][1], kinds[i]) << "row " << i;
  EXPECT_EQ(rows[1][4], "2");
  EXPECT_EQ(rows[1][5], "true");
  EXPECT_EQ(rows[6][5], "false");
}

TEST(Cli, ClassifyCircle) {
  const auto r = run_cli({"classify", "--scenario", "type_a_circle"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  int tangencies = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double x = std::stod(rows[i][0]);
    if (rows[i][1] == "tangency") {
      ++tangencies;
      EXPECT_EQ(x, 0.0);
    } else {
      EXPECT_EQ(rows[i][1], x < 0 ? "sliding" : "crossing") << x;
    }
  }
  EXPECT_EQ(tangencies, 1);
}

TEST(Cli, ClassifyEmptyGrid) {
  const auto r = run_cli({"classify", "--scenario", "type_b_cubic", "--from", "1", "--to", "0"});
  EXPECT_EQ(r.code, cli::invalid);
  EXPECT_NE(r.err.find("empty"), std::string::npos);
}

TEST(Cli, SimulateZeroTime) {
  const auto r = run_cli({"simulate", "--scenario", "type_a_circle", "--p0", "0.5,0.2", "--tmax", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(csv_rows(r.out).size(), 2u);
}

TEST(Cli, SimulateWritesFiles) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "pwsreg_sim";
  std::filesystem::remove_all(dir);
  const auto r = run_cli({"simulate", "--scenario", "type_b_cubic", "--p0", "0.6,0.1", "--tmax", "1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "trajectory.csv"));
  std::ifstream ev(dir / "events.json");
  const std::string events{std::istreambuf_iterator<char>(ev), {}};
  EXPECT_NE(events.find("sigma-cross"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli({"verify", "B", "--scenario", "type_a_circle"}).code, cli::invalid);
  EXPECT_EQ(run_cli({"simulate", "--scenario", "type_a_circle", "--p0", "9,9"}).code, cli::invalid);
  EXPECT_EQ(run_cli({"simulate", "--scenario", "type_a_circle", "--p0", "1.4,0.2", "--tmax", "10"}).code,
            cli::numerical);
  EXPECT_EQ(run_cli({"classify", "--scenario", "type_a_circle", "--tol", "bogus=1"}).code, cli::invalid);
  EXPECT_EQ(run_cli({"classify", "--scenario", "type_a_circle", "--param", "b=0.7"}).code, cli::invalid);
  EXPECT_EQ(run_cli({"nonsense"}).code, cli::invalid);
  EXPECT_EQ(run_cli({"--help"}).code, cli::ok);
}

TEST(Cli, ValidationDiagnosticsAreItemized) {
  std::ifstream in(std::string(PWSREG_FIXTURE_DIR) + "/type_b_cubic.json");
  std::string text{std::istreambuf_iterator<char>(in), {}};
  text.replace(text.find("2*x - 3*x^2"), 11, "1 + x");
  const std::string path = ::testing::TempDir() + "bad_cubic.json";
  std::ofstream(path) << text;
  const auto r = run_cli({"classify", "--scenario", path});
  EXPECT_EQ(r.code, cli::invalid);
  EXPECT_NE(r.err.find("contact_multiplicity mismatch"), std::string::npos) << r.err;
}

TEST(Cli, VerifyIsDeterministic) {
  const std::vector<std::string> args{"verify", "A", "--scenario", "type_a_circle", "--param", "b=0.1", "--lambda", "0.75"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find("\"discriminant\""), std::string::npos);
  EXPECT_NE(a.out.find("\"rows\""), std::string::npos);
}

TEST(Cli, SweepWritesPerRowFiles) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "pwsreg_sweep";
  std::filesystem::remove_all(dir);
  const auto r = run_cli({"sweep", "--scenario", "type_a_circle", "--param", "b=0.1", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(std::filesystem::exists(dir / ("cycle_" + std::to_string(i) + ".csv")));
  EXPECT_TRUE(std::filesystem::exists(dir / "sweep.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "gamma.csv"));
}

TEST(Cli, ReturnMapTable) {
  const auto r = run_cli({"return-map", "--scenario", "type_b_cubic", "--from", "0.01", "--to", "0.05", "--n", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_NEAR(std::stod(rows[5][1]), 0.00238638, 1e-7);
}

TEST(Cli, TransitionMapSummary) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / "pwsreg_tm";
  std::filesystem::remove_all(dir);
  const auto r = run_cli({"transition-map", "--scenario", "type_a_circle", "--eps", "4e-3,2e-3,1e-3", "--lambda", "0.5",
                          "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(std::filesystem::exists(dir / "transition_map.json"));
  EXPECT_EQ(csv_rows([&] {
              std::ifstream f(dir / "transition_map.csv");
              return std::string{std::istreambuf_iterator<char>(f), {}};
            }()).size(),
            28u);
}
