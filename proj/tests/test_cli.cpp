#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "poisson_currents/cli.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
constexpr double kPi = 3.14159265358979323846;

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / ("poisson_currents_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

class ScratchCleanup : public ::testing::Environment {
 public:
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(scratch(), ec);
  }
};

const auto* const kCleanup = ::testing::AddGlobalTestEnvironment(new ScratchCleanup);

Result run(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd = env + " \"" POISSON_CURRENTS_CLI "\" " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

fs::path write_config(const std::string& name, const json& j) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p;
}

std::string data(const std::string& name) { return std::string(POISSON_CURRENTS_DATA) + "/" + name; }

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST(BoundaryLimit, DiagonalLimitIsOne) {
  const auto r = run("boundary-limit --config " + data("boundary_limit.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 21u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "re_pairing", "im_pairing", "re_limit", "im_limit", "abs_gap"}));
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(std::stod(rows[i][3]), 1.0);
  EXPECT_LT(std::stod(rows.back()[5]), 1e-4);
}

TEST(BoundaryLimit, ZeroFormGivesZeroTable) {
  const auto cfg = write_config("zero.json", {{"form", data("form_n3_zero.json")}});
  const auto r = run("boundary-limit --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (std::size_t c = 1; c < rows[i].size(); ++c) EXPECT_EQ(std::stod(rows[i][c]), 0.0);
  }
}

TEST(BoundaryLimit, ReversedGridGivesIdenticalRows) {
  const std::string cfg = " --config " + data("boundary_limit.json");
  const auto a = run("boundary-limit" + cfg + " --rgrid list:0.5,0.75,0.875,0.9375");
  const auto b = run("boundary-limit" + cfg + " --rgrid list:0.9375,0.875,0.75,0.5,0.75");
  EXPECT_EQ(parse_csv(a.out).size(), 5u);
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
}

TEST(BoundaryLimit, FlagOverridesConfigTolerance) {
  // The config asks for 1e-4; a coarse grid with a tight flag fails honestly.
  const auto r = run("boundary-limit --config " + data("boundary_limit.json") + " --rgrid geometric:3 --tol 1e-9");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("FAIL"), std::string::npos);
}

TEST(IsometryCheck, SingleModeIsTwoPi) {
  const auto cfg = write_config("iso.json", {{"form", data("form_n2_k0.json")}});
  const auto r = run("isometry-check --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j.at("closed_form").get<double>(), 2.0 * kPi, 1e-14);
  EXPECT_LE(j.at("relative_gap").get<double>(), 1e-5);
  EXPECT_TRUE(j.at("pass").get<bool>());
}

TEST(IsometryCheck, EmptyAndMixture) {
  const auto empty = write_config("iso_empty.json", {{"form", {{"n", 2}, {"p", 1}, {"kmax", 3}, {"modes", json::array()}}}});
  const auto r = run("isometry-check --config " + empty.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("closed_form").get<double>(), 0.0);
  EXPECT_EQ(j.at("quadrature").get<double>(), 0.0);

  const auto mix = write_config("iso_mix.json", {{"form", data("form_n2_mixture.json")}});
  const auto m = run("isometry-check --config " + mix.string());
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_LE(json::parse(m.out).at("relative_gap").get<double>(), 1e-5);
}

TEST(IsometryCheck, RejectsSphereForm) {
  const auto cfg = write_config("iso_bad.json", {{"form", data("form_n3_k0.json")}});
  EXPECT_EQ(run("isometry-check --config " + cfg.string()).code, 2);
}

TEST(SpecfunIdentities, AllFamiliesPass) {
  const auto r = run("specfun-identities");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 6u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][4], "1") << rows[i][0];
    EXPECT_LE(std::stod(rows[i][2]), std::stod(rows[i][3]));
  }
}

TEST(OrbitSeries, FreeGroupCounts) {
  const auto r = run("orbit-series --config " + data("orbit_series.json") + " --max-word-len 5");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 11u);  // two exponents, lengths 1..5
  const std::vector<std::string> counts = {"4", "12", "36", "108", "324"};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(rows[1 + i][1], counts[i]);
    EXPECT_EQ(rows[6 + i][1], counts[i]);
  }
  // s = 100: nothing beyond length 1 contributes.
  const double after_one = std::stod(rows[6][4]);
  for (int i = 7; i <= 10; ++i) EXPECT_NEAR(std::stod(rows[i][4]), after_one, 1e-10);
}

TEST(OrbitSeries, RerunsAreByteIdentical) {
  const fs::path a = scratch() / "orbit_a", b = scratch() / "orbit_b";
  const std::string cfg = " --config " + data("orbit_series.json");
  ASSERT_EQ(run("orbit-series" + cfg + " --out " + a.string(), "POISSON_CURRENTS_THREADS=1").code, 0);
  ASSERT_EQ(run("orbit-series" + cfg + " --out " + b.string(), "POISSON_CURRENTS_THREADS=7").code, 0);
  for (const char* f : {"lengths.csv", "words.csv", "summary.json"}) {
    EXPECT_FALSE(slurp(a / f).empty()) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto summary = json::parse(slurp(a / "summary.json"));
  EXPECT_TRUE(summary.at("counts_match").get<bool>());
  const double delta = summary.at("critical_exponent").at("value").get<double>();
  EXPECT_GT(delta, 0.0);
  EXPECT_LT(delta, 2.0);
}

TEST(OrbitSeries, BudgetIsAnInputError) {
  const auto r = run("orbit-series --config " + data("orbit_series.json") + " --max-word-len 20");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(SchottkyCurrent, WritesThreeTablesAndPasses) {
  const fs::path dir = scratch() / "schottky";
  const auto r = run("schottky-current --config " + data("schottky_current.json") + " --out " + dir.string());
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"cocycle_check.csv", "gradient_decay.csv", "support_check.csv", "summary.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  const auto grad = parse_csv(slurp(dir / "gradient_decay.csv"));
  EXPECT_EQ(grad.size(), 27u);
  const auto support = parse_csv(slurp(dir / "support_check.csv"));
  EXPECT_EQ(support.size(), 21u);
  EXPECT_LE(std::abs(std::stod(support.back()[1])), 1e-3);
  const auto cocycle = parse_csv(slurp(dir / "cocycle_check.csv"));
  EXPECT_EQ(cocycle.size(), 13u);  // 3 points x 4 letters
  for (std::size_t i = 1; i < cocycle.size(); ++i) EXPECT_LE(std::stod(cocycle[i][6]), 5e-3);
}

TEST(SchottkyCurrent, CircleGroupPasses) {
  const auto cfg = write_config("sc2.json", {{"group", data("group_n2.json")}});
  const auto r = run("schottky-current --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 4u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i][3], "1") << rows[i][0];
}

TEST(CocyclePairing, BuiltInCases) {
  const auto r = run("cocycle-pairing");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows.size(), 23u);
  EXPECT_EQ(rows[1][0], "xy");
  EXPECT_NEAR(std::stod(rows[1][1]), -kPi, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][3]), kPi, 1e-12);
  EXPECT_LE(std::stod(rows[1][5]), 1e-6);
  EXPECT_EQ(rows[2][0], "constant");
  for (std::size_t c = 1; c < 6; ++c) EXPECT_EQ(std::stod(rows[2][c]), 0.0);
  for (std::size_t i = 3; i < rows.size(); ++i) EXPECT_LE(std::stod(rows[i][5]), 1e-4);
}

TEST(CocyclePairing, SeedDeterminesSweep) {
  const auto a = run("cocycle-pairing --seed 7");
  const auto b = run("cocycle-pairing --seed 7", "POISSON_CURRENTS_THREADS=1");
  const auto c = run("cocycle-pairing --seed 8");
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out, c.out);
}

TEST(CocyclePairing, UserCases) {
  const auto r = run("cocycle-pairing --config " + data("cocycle_pairing.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  EXPECT_EQ(rows.back()[0], "user_0");
}

TEST(GradientOrigin, FirstCoordinateGivesFourNinths) {
  const auto r = run("gradient-origin");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j.at("formula").get<double>(), 4.0 / 9.0, 1e-12);
  EXPECT_LE(j.at("gap").get<double>(), 1e-6);
}

TEST(ExitCodes, InputErrors) {
  const std::string cfg = " --config " + data("boundary_limit.json");
  EXPECT_EQ(run("boundary-limit" + cfg + " --kmax 65").code, 2);
  EXPECT_EQ(run("boundary-limit" + cfg + " --tol 0").code, 2);
  EXPECT_EQ(run("boundary-limit" + cfg + " --rgrid geometric:0").code, 2);
  EXPECT_EQ(run("boundary-limit" + cfg + " --rgrid list:0.5,1.5").code, 2);
  EXPECT_EQ(run("boundary-limit" + cfg + " --frobnicate").code, 2);
  EXPECT_EQ(run("boundary-limit --config /nonexistent/config.json").code, 2);
  EXPECT_EQ(run("boundary-limit").code, 2);  // no form
  EXPECT_EQ(run("orbit-series --config " + data("orbit_series.json") + " --max-word-len 21").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
  EXPECT_EQ(run("").code, 2);

  const fs::path broken = scratch() / "broken.json";
  std::ofstream(broken) << "{\"form\": ";
  EXPECT_EQ(run("boundary-limit --config " + broken.string()).code, 2);
  const auto bad_group = write_config("bad_group.json", {{"group", {{"n", 3}, {"disks", {{{"center", {0.0, 0.0}}, {"radius", 1.0}}, {{"center", {0.5, 0.0}}, {"radius", 1.0}}}}}}});
  EXPECT_EQ(run("orbit-series --config " + bad_group.string()).code, 2);
}

TEST(Library, RunReportsThroughStreams) {
  poisson_currents::cli::RunConfig config;
  config.command = "gradient-origin";
  std::ostringstream out, err;
  EXPECT_EQ(poisson_currents::cli::run(config, out, err), 0);
  EXPECT_NE(err.str().find("PASS"), std::string::npos);
  config.kmax = 80;
  std::ostringstream out2, err2;
  EXPECT_EQ(poisson_currents::cli::run(config, out2, err2), 2);
  EXPECT_EQ(poisson_currents::cli::parse_rgrid("geometric:4").size(), 4u);
  EXPECT_THROW(poisson_currents::cli::parse_rgrid("uniform:4"), poisson_currents::io::InputError);
}

}  // namespace
