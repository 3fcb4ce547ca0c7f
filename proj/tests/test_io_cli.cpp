#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "support/test_util.hpp"
#include "wbz/cli.hpp"
#include "wbz/io.hpp"

using namespace wbz;
using wbz::test::TempDir;

namespace {

std::string worked_spec_json(double h, double horizon) {
  ProblemSpec spec;
  spec.m = 1;
  spec.p = 2;
  spec.d = Mat(1, 2);
  spec.d << 1.0, 0.0;
  Mat c(1, 2);
  c << 0.0, 1.0;
  spec.terms.push_back({c, cx(1.0, 0.0)});
  spec.grid = TimeGrid::from_horizon(h, horizon);
  return problem_spec_to_json(spec);
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::vector<const char*> argv;
  argv.push_back("wiener-bezout");
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str() + err.str();
  return rc;
}

}  // namespace

TEST_CASE("kernel CSV round trip") {
  TempDir dir("kernel_csv");
  TimeGrid grid(0.05, 41);
  Rng rng(13);
  std::vector<Mat> samples(grid.n);
  for (int i = 0; i < grid.n; ++i) samples[i] = rng.cgaussian_matrix(2, 3);
  CausalKernel k = CausalKernel::from_samples(grid, samples);
  std::string path = dir.str() + "/k.csv";
  write_kernel_csv(path, k);
  CausalKernel back = read_kernel_csv(path);
  CHECK(back.rows() == 2);
  CHECK(back.cols() == 3);
  CHECK(back.grid().n == grid.n);
  double worst = 0.0;
  for (int i = 0; i < grid.n; ++i) worst = std::max(worst, (back.sample(i) - k.sample(i)).norm());
  CHECK(worst < 1e-11);
}

TEST_CASE("kernel CSV rejects malformed files") {
  TempDir dir("kernel_bad");
  std::string path = dir.str() + "/bad.csv";
  {
    std::ofstream f(path);
    f << "t, re_0_0, im_0_0\n0.0, 1.0, 0.0\n0.1, 1.0, 0.0\n0.3, 1.0, 0.0\n";  // non-uniform
  }
  CHECK_THROWS_AS(read_kernel_csv(path), ParseError);
  {
    std::ofstream f(path);
    f << "re_0_0, im_0_0\n1.0, 0.0\n";
  }
  CHECK_THROWS_AS(read_kernel_csv(path), ParseError);
}

TEST_CASE("problem spec parse and emit round trip") {
  std::string json = worked_spec_json(0.02, 16.0);
  ProblemSpec spec = parse_problem_spec(json);
  CHECK(spec.m == 1);
  CHECK(spec.p == 2);
  CHECK(spec.grid.h == doctest::Approx(0.02));
  CHECK(spec.grid.horizon() == doctest::Approx(16.0));
  CHECK(spec.terms.size() == 1);
  CHECK(problem_spec_to_json(spec) == json);  // byte identical

  CHECK_THROWS_AS(parse_problem_spec("{ not json"), ParseError);
  CHECK_THROWS_AS(parse_problem_spec("{\"m\": 2, \"p\": 1, \"D\": []}"), ParseError);
}

TEST_CASE("solution bundle round trip preserves the solution") {
  TempDir dir("bundle");
  ProblemSpec spec = parse_problem_spec(worked_spec_json(0.02, 16.0));
  WienerPlusFunction g = spec.build_g();
  BezoutSolution sol = solve_bezout(g, spec.grid);
  write_solution_bundle(dir.str(), spec, sol, spec.build_freq());

  SolutionBundle back = load_solution_bundle(dir.str());
  CHECK(back.spec.m == 1);
  CHECK(back.sol.diagnostics.route_a);
  double worst = 0.0;
  for (int i = 0; i < sol.grid().n; ++i)
    worst = std::max(worst, (back.sol.y.sample(i) - sol.y.sample(i)).norm());
  CHECK(worst < 1e-11);
  CHECK((back.sol.pointers.e - sol.pointers.e).norm() < 1e-12);

  // traces.csv carries Theta(0) in its middle row
  std::ifstream traces(dir.str() + "/traces.csv");
  REQUIRE(traces.good());
  std::string line, mid;
  std::getline(traces, line);  // header
  CHECK(line.find("Theta_re_0_0") != std::string::npos);
  for (int i = 0; i <= spec.freq_count / 2; ++i) std::getline(traces, mid);
  std::istringstream ms(mid);
  std::vector<double> vals;
  std::string tok;
  while (std::getline(ms, tok, ',')) vals.push_back(std::stod(tok));
  CHECK(vals[0] == doctest::Approx(0.0));  // omega = 0 row
  // columns: omega, Xi(2), Theta(2), Y(4) as re/im pairs
  double theta0_first = vals[1 + 4];
  double theta0_second = vals[1 + 6];
  CHECK(theta0_first == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(2e-3));
  CHECK(theta0_second == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(2e-3));
}

TEST_CASE("report writers emit the registry ids") {
  TempDir dir("report");
  ResidualReport report;
  report.entries.push_back({"bezout", 1e-5, 1e-3, true, ""});
  report.entries.push_back({"winding", 0.0, 0.5, true, "winding=0"});
  write_report_json(dir.str() + "/report.json", report);
  write_report_csv(dir.str() + "/report.csv", report);
  std::ifstream j(dir.str() + "/report.json");
  std::stringstream js;
  js << j.rdbuf();
  CHECK(js.str().find("\"overall_pass\": true") != std::string::npos);
  std::ifstream c(dir.str() + "/report.csv");
  std::string header;
  std::getline(c, header);
  CHECK(header == "check, residual, tolerance, pass");
}

TEST_CASE("cli: demo, check, solve, verify, eval round trip") {
  TempDir dir("cli");
  std::string out;
  CHECK(cli({"demo", "--output", dir.str()}) == 0);
  CHECK(cli({"check", dir.str() + "/problem.json", "--grid-step", "0.05", "--horizon", "12"}, &out) == 0);
  CHECK(out.find("\"route_a\": true") != std::string::npos);

  std::string bundle = dir.str() + "/bundle";
  CHECK(cli({"solve", dir.str() + "/problem.json", "--output", bundle, "--grid-step", "0.02",
             "--horizon", "16"}) == 0);
  CHECK(cli({"verify", bundle, "--tol", "4e-3"}, &out) == 0);
  CHECK(out.find("overall: pass") != std::string::npos);

  CHECK(cli({"eval", bundle, "--omega", "0"}, &out) == 0);
  CHECK(out.find("Y_inverse") != std::string::npos);

  // far along the axis everything is close to its value at infinity
  CHECK(cli({"eval", bundle, "--omega", "1e9"}, &out) == 0);
  CHECK(out.find("\"s\"") == std::string::npos);

  CHECK(cli({"eval", bundle, "--s", "-1,0"}, &out) == 2);
}

TEST_CASE("cli: mathematical failure and input errors map to exit codes") {
  TempDir dir("cli_codes");
  // non-surjective D
  ProblemSpec spec;
  spec.m = 1;
  spec.p = 2;
  spec.d = Mat::Zero(1, 2);
  Mat c(1, 2);
  c << 0.0, 1.0;
  spec.terms.push_back({c, cx(1.0, 0.0)});
  spec.grid = TimeGrid::from_horizon(0.02, 12.0);
  std::string path = dir.str() + "/zero.json";
  {
    std::ofstream f(path);
    f << problem_spec_to_json(spec);
  }
  CHECK(cli({"check", path}) == 1);

  std::string garbage = dir.str() + "/garbage.json";
  {
    std::ofstream f(garbage);
    f << "{ definitely not json";
  }
  CHECK(cli({"check", garbage}) == 2);
  CHECK(cli({"verify", dir.str() + "/missing"}) == 2);
  CHECK(cli({"frobnicate"}) == 2);
}

TEST_CASE("cli outputs are deterministic") {
  TempDir dir("cli_det");
  std::string spec = dir.str() + "/problem.json";
  {
    std::ofstream f(spec);
    f << worked_spec_json(0.05, 10.0);
  }
  auto run_once = [&](const std::string& tag) {
    std::string bundle = dir.str() + "/" + tag;
    REQUIRE(cli({"solve", spec, "--output", bundle}) == 0);
    std::ifstream s(bundle + "/solution.json"), y(bundle + "/y.csv"), t(bundle + "/traces.csv");
    std::stringstream all;
    all << s.rdbuf() << y.rdbuf() << t.rdbuf();
    return all.str();
  };
  CHECK(run_once("a") == run_once("b"));
}

TEST_CASE("square-case bundle notes the empty Theta") {
  TempDir dir("cli_square");
  ProblemSpec spec;
  spec.m = 2;
  spec.p = 2;
  spec.d = Mat::Identity(2, 2);
  Mat c(2, 2);
  c << 0.3, 0.0, 0.1, 0.2;
  spec.terms.push_back({c, cx(1.0, 0.0)});
  spec.grid = TimeGrid::from_horizon(0.02, 12.0);
  std::string path = dir.str() + "/square.json";
  {
    std::ofstream f(path);
    f << problem_spec_to_json(spec);
  }
  std::string out;
  CHECK(cli({"solve", path, "--output", dir.str() + "/bundle"}, &out) == 0);
  CHECK(out.find("unique") != std::string::npos);
  std::ifstream s(dir.str() + "/bundle/solution.json");
  std::stringstream ss;
  ss << s.rdbuf();
  CHECK(ss.str().find("\"theta_columns\": 0") != std::string::npos);
  CHECK(cli({"verify", dir.str() + "/bundle", "--tol", "4e-3"}) == 0);
}
