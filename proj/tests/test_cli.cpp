#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "dmlpg/dmlpg.hpp"

namespace {

using namespace dmlpg;
namespace fs = std::filesystem;

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dmlpg_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  const int status = std::system((std::string(DMLPG_CLI_PATH) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(ParseConfig, DefaultsForTestProblem) {
  const RunConfig c = parse_config("");
  EXPECT_EQ(c.problem, ProblemKind::Test);
  EXPECT_EQ(c.method, Method::Dmlpg1);
  EXPECT_EQ(c.degree, 2);
  EXPECT_DOUBLE_EQ(c.spacing(), 0.1);
  EXPECT_DOUBLE_EQ(*c.delta0, 4.0);
  EXPECT_EQ(c.scheme_kind(), SchemeKind::CrankNicolson);
  EXPECT_DOUBLE_EQ(c.final_time(), 1.0);
  EXPECT_EQ(c.output_times, std::vector<double>{1.0});
}

TEST(ParseConfig, FgmDefaultsAndGamma) {
  const RunConfig c = parse_config("problem = fgm\ngamma = 50   # graded\n");
  EXPECT_EQ(c.problem, ProblemKind::Fgm);
  EXPECT_DOUBLE_EQ(c.fgm.gamma, 50.0);
  EXPECT_DOUBLE_EQ(c.spacing(), 0.004);
  EXPECT_EQ(c.scheme_kind(), SchemeKind::MethodOfLines);
  EXPECT_DOUBLE_EQ(c.final_time(), 60.0);
  EXPECT_EQ(c.output_times, (std::vector<double>{10.0, 10.5, 30.0, 60.0}));
  EXPECT_EQ(c.probes().size(), 3u);
}

TEST(ParseConfig, GridAlternativeToSpacing) {
  EXPECT_DOUBLE_EQ(parse_config("grid = 21").spacing(), 0.05);
  EXPECT_THROW(parse_config("grid = 21\nh = 0.05"), ConfigError);
}

void expect_error_on_line(const std::string& text, std::size_t line) {
  try {
    parse_config(text);
    FAIL() << "accepted: " << text;
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), line) << e.what();
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(line)), std::string::npos);
  }
}

TEST(ParseConfig, RejectsInvalidInputWithLineNumbers) {
  expect_error_on_line("method = dmlpg1\nh = -0.1\n", 2);
  expect_error_on_line("# comment\n\nfoo = 3\n", 3);
  expect_error_on_line("h = 0.1\nh = 0.2\n", 2);
  expect_error_on_line("h = abc\n", 1);
  expect_error_on_line("just words\n", 1);
  expect_error_on_line("method = dmlpg3\n", 1);
  expect_error_on_line("scheme = rk4\n", 1);
  expect_error_on_line("m = 1.5\n", 1);
  expect_error_on_line("h = 0.3\n", 1);
  expect_error_on_line("t_final = 1\ndt = 0.3\n", 2);
  expect_error_on_line("output_times = 0.5, 2\n", 1);
  expect_error_on_line("dt = 0.1\noutput_times = 0.55\n", 2);
  expect_error_on_line("condition_limit = 0.5\n", 1);
  expect_error_on_line("m = 5\ngrid = 3\n", 1);
}

TEST(ParseConfig, ManifestRoundTrip) {
  const RunConfig a = parse_config("problem = fgm\ngamma = 20\nmethod = dmlpg4\nrtol = 1e-7\nh_list = 0.008, 0.004\n");
  const std::string text = to_config_text(a);
  const RunConfig b = parse_config(text);
  EXPECT_EQ(to_config_text(b), text);
  EXPECT_EQ(b.method, Method::Dmlpg4);
  EXPECT_DOUBLE_EQ(b.rtol, 1e-7);
  EXPECT_EQ(b.h_list, (std::vector<double>{0.008, 0.004}));
}

TEST(Driver, SolveWritesDeterministicOutputs) {
  const fs::path d1 = scratch_dir("det1"), d2 = scratch_dir("det2");
  const RunConfig c = parse_config("h = 0.2\ndt = 0.05\n");
  const RunOutput r = run_solve(c, d1);
  run_solve(c, d2);
  ASSERT_TRUE(r.error.has_value());
  EXPECT_LT(r.error->max, 0.01);
  EXPECT_EQ(read_file(d1 / "solution.csv"), read_file(d2 / "solution.csv"));
  EXPECT_EQ(read_file(d1 / "errors.csv"), read_file(d2 / "errors.csv"));
  EXPECT_TRUE(fs::exists(d1 / "timings.csv"));
  EXPECT_EQ(parse_config(read_file(d1 / "manifest.cfg")).spacing(), 0.2);
  const std::string sol = read_file(d1 / "solution.csv");
  EXPECT_EQ(sol.rfind("t,x1,x2,u\n", 0), 0u);
  EXPECT_EQ(std::count(sol.begin(), sol.end(), '\n'), 1 + 36);
}

TEST(Driver, FgmProbesAgainstSeries) {
  const fs::path d = scratch_dir("fgm");
  const RunConfig c = parse_config("problem = fgm\nh = 0.008\nt_final = 10.5\noutput_times = 10, 10.5\n");
  const RunOutput r = run_solve(c, d);
  ASSERT_EQ(r.probe_values.size(), 2u);
  ASSERT_TRUE(r.error.has_value());
  EXPECT_LT(r.error->max, 0.02);
  const std::string sol = read_file(d / "solution.csv");
  EXPECT_EQ(std::count(sol.begin(), sol.end(), '\n'), 1 + 6 + 36);
}

TEST(Driver, ConvergenceStudyReportsOrders) {
  const fs::path d = scratch_dir("conv");
  const RunConfig c = parse_config("problem = manufactured\nh_list = 0.25, 0.125\nt_final = 0.5\ndt = 0.25\n");
  const auto rows = run_convergence(c, d);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_FALSE(rows[0].order.has_value());
  EXPECT_TRUE(rows[1].order.has_value());
  EXPECT_LT(rows[1].max_err, 1e-10);
  const std::string t = read_file(d / "timings.csv");
  EXPECT_NE(t.find("h=0.125/assembly"), std::string::npos);
}

TEST(Driver, ConvergenceNeedsReference) {
  const RunConfig c = parse_config("problem = fgm\ngamma = 20\nh_list = 0.008\nt_final = 1\noutput_times = 1\n");
  EXPECT_THROW(run_convergence(c, scratch_dir("noref")), NotApplicable);
}

TEST(Binary, ExitCodes) {
  const fs::path d = scratch_dir("bin");
  {
    std::ofstream(d / "good.cfg") << "h = 0.25\ndt = 0.25\nout = " << (d / "out").string() << "\n";
    std::ofstream(d / "bad.cfg") << "h = -0.1\n";
    std::ofstream(d / "unstable.cfg") << "h = 0.25\ndt = 0.25\ndelta0 = 0.5\n";
  }
  EXPECT_EQ(run_cli("solve --config " + (d / "good.cfg").string()), 0);
  EXPECT_TRUE(fs::exists(d / "out" / "solution.csv"));
  EXPECT_EQ(run_cli("solve --config " + (d / "bad.cfg").string()), 2);
  EXPECT_EQ(run_cli("solve --config " + (d / "missing.cfg").string()), 2);
  EXPECT_EQ(run_cli("solve"), 2);
  EXPECT_EQ(run_cli("solve --config " + (d / "unstable.cfg").string() + " --out " + (d / "u").string()), 3);
  EXPECT_EQ(run_cli("study timing --config " + (d / "good.cfg").string() + " --out " + (d / "t").string()), 0);
  EXPECT_TRUE(fs::exists(d / "t" / "timings.csv"));
}

}  // namespace
