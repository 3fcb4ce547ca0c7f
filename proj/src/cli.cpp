#include "wbz/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "wbz/io.hpp"
#include "wbz/oracle.hpp"

namespace fs = std::filesystem;

namespace wbz {

namespace {

struct CommonFlags {
  double grid_step = 0.0;
  double horizon = 0.0;
  double freq_max = 0.0;
  int freq_count = 0;
  double tol = 0.0;
  std::string output;

  void attach(CLI::App* app) {
    app->add_option("--grid-step", grid_step, "Override the time step h");
    app->add_option("--horizon", horizon, "Override the truncation horizon T");
    app->add_option("--freq-max", freq_max, "Override the frequency grid half-width");
    app->add_option("--freq-count", freq_count, "Override the frequency grid point count");
    app->add_option("--tol", tol, "Override the identity-check tolerance");
  }

  void apply(ProblemSpec& spec) const {
    double h = grid_step > 0.0 ? grid_step : spec.grid.h;
    double t = horizon > 0.0 ? horizon : spec.grid.horizon();
    if (grid_step > 0.0 || this->horizon > 0.0) spec.grid = TimeGrid::from_horizon(h, t);
    if (freq_max > 0.0) spec.omega_max = freq_max;
    if (freq_count > 0) spec.freq_count = freq_count;
    if (tol > 0.0) spec.tolerance = tol;
  }
};

void apply_thread_cap() {
  if (const char* env = std::getenv("WIENER_BEZOUT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) Eigen::setNbThreads(n);
  }
}

std::string check_json(const Certification& cert) {
  std::ostringstream os;
  os << "{\n  \"lambda_min\": " << format_double(cert.lambda_min)
     << ",\n  \"lambda_max\": " << format_double(cert.lambda_max)
     << ",\n  \"route_a\": " << (cert.route_a ? "true" : "false")
     << ",\n  \"route_b\": " << (cert.route_b ? "true" : "false") << "\n}\n";
  return os.str();
}

int cmd_check(const std::string& spec_path, const CommonFlags& flags, std::ostream& out) {
  ProblemSpec spec = load_problem_spec(spec_path);
  flags.apply(spec);
  WienerPlusFunction g = spec.build_g(fs::path(spec_path).parent_path().string());
  Certification cert = certify_right_invertible(g, spec.grid);
  std::string payload = check_json(cert);
  if (!flags.output.empty()) {
    std::ofstream f(flags.output);
    f << payload;
  } else {
    out << payload;
  }
  return cert.certified() ? 0 : 1;
}

int cmd_solve(const std::string& spec_path, const CommonFlags& flags, std::ostream& out) {
  ProblemSpec spec = load_problem_spec(spec_path);
  flags.apply(spec);
  if (flags.output.empty()) throw ParseError("solve: --output directory is required");
  WienerPlusFunction g = spec.build_g(fs::path(spec_path).parent_path().string());
  BezoutSolution sol = solve_bezout(g, spec.grid);
  write_solution_bundle(flags.output, spec, sol, spec.build_freq());
  out << "solution bundle written to " << flags.output << "\n";
  out << "lambda_min = " << format_double(sol.diagnostics.lambda_min)
      << ", solver residual = " << format_double(sol.diagnostics.solver_residual) << "\n";
  if (sol.p() == sol.m()) out << "square case: Theta has no columns, the solution is unique\n";
  return 0;
}

int cmd_verify(const std::string& bundle_dir, bool full, const CommonFlags& flags, std::ostream& out) {
  SolutionBundle bundle = load_solution_bundle(bundle_dir);
  ProblemSpec spec = bundle.spec;
  flags.apply(spec);
  VerifyOptions opts;
  opts.full = full;
  opts.tolerance = spec.tolerance;
  ResidualReport report = run_verification(bundle.sol, spec.build_freq(), opts);
  std::string dir = flags.output.empty() ? bundle_dir : flags.output;
  fs::create_directories(dir);
  write_report_json((fs::path(dir) / "report.json").string(), report);
  write_report_csv((fs::path(dir) / "report.csv").string(), report);
  for (const auto& e : report.entries)
    out << (e.pass ? "[pass] " : "[FAIL] ") << e.id << "  residual " << format_double(e.residual)
        << "  tol " << format_double(e.tolerance) << (e.note.empty() ? "" : "  (" + e.note + ")")
        << "\n";
  out << (report.overall() ? "overall: pass" : "overall: FAIL") << "\n";
  return report.overall() ? 0 : 1;
}

int cmd_eval(const std::string& bundle_dir, double omega, bool has_omega, const std::string& s_arg,
             std::ostream& out) {
  cx s;
  if (has_omega) {
    s = cx(0.0, omega);
  } else {
    double re = 0.0, im = 0.0;
    if (std::sscanf(s_arg.c_str(), "%lf,%lf", &re, &im) != 2)
      throw ParseError("eval: expected --s \"re,im\"");
    s = cx(re, im);
  }
  if (s.real() < 0.0) throw ParseError("eval: points with Re s < 0 are outside the domain");
  SolutionBundle bundle = load_solution_bundle(bundle_dir);
  const BezoutSolution& sol = bundle.sol;
  out << "s = " << format_cx_json(s) << "\n";
  out << "G = " << format_matrix_json(eval_wiener(sol.g, s)) << "\n";
  out << "Y = " << format_matrix_json(eval_wiener(sol.Y, s)) << "\n";
  out << "Y_inverse = " << format_matrix_json(eval_Y_inverse_at(sol, s)) << "\n";
  out << "Xi = " << format_matrix_json(eval_wiener(sol.xi, s)) << "\n";
  out << "Theta = " << format_matrix_json(eval_wiener(sol.theta, s)) << "\n";
  return 0;
}

int cmd_demo(double b, double c, const std::string& output, std::ostream& out) {
  TimeGrid grid(0.01, 3001);
  WorkedInstance w = worked_family(b, c, grid);

  ProblemSpec spec;
  spec.m = 1;
  spec.p = 2;
  spec.d = w.g.at_infinity();
  spec.terms = w.g.kernel().exp_terms();
  spec.grid = grid;

  std::string dir = output.empty() ? "." : output;
  fs::create_directories(dir);
  {
    std::ofstream f(fs::path(dir) / "problem.json");
    f << problem_spec_to_json(spec);
  }
  std::ostringstream os;
  os << "{\n";
  os << "  \"b\": " << format_double(b) << ",\n";
  os << "  \"c\": " << format_double(c) << ",\n";
  os << "  \"a\": " << format_double(w.a) << ",\n";
  os << "  \"theta_at_zero\": " << format_matrix_json(eval_wiener(w.theta, cx(0.0, 0.0))) << ",\n";
  os << "  \"y_inverse_at_zero\": " << format_matrix_json(eval_wiener(w.y_inverse, cx(0.0, 0.0)))
     << ",\n";
  os << "  \"det_y\": {\"zero\": " << format_cx_json(cx(-b, 0.0))
     << ", \"pole\": " << format_cx_json(cx(-w.a, 0.0)) << "},\n";
  os << "  \"y_terms\": [";
  const auto& terms = w.y.exp_terms();
  for (size_t k = 0; k < terms.size(); ++k) {
    if (k) os << ", ";
    os << "{\"coeff\": " << format_matrix_json(terms[k].coeff)
       << ", \"pole\": " << format_cx_json(terms[k].pole) << "}";
  }
  os << "]\n}\n";
  {
    std::ofstream f(fs::path(dir) / "expected.json");
    f << os.str();
  }
  out << "worked-family problem and expected values written to " << dir << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  apply_thread_cap();
  CLI::App app{"Bezout equation G(s)X(s) = I on the right half plane, Wiener class"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string spec_path, bundle_dir, s_arg;
  double omega = 0.0, demo_b = 1.0, demo_c = 1.0;
  bool full = false;

  CLI::App* check = app.add_subcommand("check", "Certify right invertibility of T_G");
  check->add_option("spec", spec_path, "Problem spec JSON")->required();
  check->add_option("--output", flags.output, "Write the JSON result to this path");
  flags.attach(check);

  CLI::App* solve = app.add_subcommand("solve", "Solve the Bezout equation and write a bundle");
  solve->add_option("spec", spec_path, "Problem spec JSON")->required();
  solve->add_option("--output", flags.output, "Bundle output directory")->required();
  flags.attach(solve);

  CLI::App* verify = app.add_subcommand("verify", "Run the residual suite on a solution bundle");
  verify->add_option("bundle", bundle_dir, "Solution bundle directory")->required();
  verify->add_flag("--full", full, "Include appendix, Pythagoras, and route checks");
  verify->add_option("--output", flags.output, "Report output directory (default: bundle)");
  flags.attach(verify);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate the solution functions at a point");
  eval->add_option("bundle", bundle_dir, "Solution bundle directory")->required();
  CLI::Option* om = eval->add_option("--omega", omega, "Evaluate at s = i omega");
  CLI::Option* sv = eval->add_option("--s", s_arg, "Evaluate at s = re + i im, given as \"re,im\"");
  om->excludes(sv);

  CLI::App* demo = app.add_subcommand("demo", "Emit the worked family as problem + expected values");
  demo->add_option("--b", demo_b, "Pole parameter b > 0");
  demo->add_option("--c", demo_c, "Coupling parameter c != 0");
  demo->add_option("--output", flags.output, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (check->parsed()) return cmd_check(spec_path, flags, out);
    if (solve->parsed()) return cmd_solve(spec_path, flags, out);
    if (verify->parsed()) return cmd_verify(bundle_dir, full, flags, out);
    if (eval->parsed()) {
      if (!*om && !*sv) throw ParseError("eval: one of --omega or --s is required");
      return cmd_eval(bundle_dir, omega, static_cast<bool>(*om), s_arg, out);
    }
    if (demo->parsed()) return cmd_demo(demo_b, demo_c, flags.output, out);
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const NotRightInvertible& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  } catch (const RouteDisagreement& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace wbz
