#include "wbz/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace wbz {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12e", v);
  return buf;
}

std::string format_cx_json(cx v) {
  return "[" + format_double(v.real()) + ", " + format_double(v.imag()) + "]";
}

std::string format_matrix_json(const Mat& m) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ", ";
      out += format_cx_json(m(i, j));
    }
    out += "]";
  }
  return out + "]";
}

namespace {

std::string format_cx(cx v) { return format_cx_json(v); }
std::string format_matrix(const Mat& m) { return format_matrix_json(m); }

cx parse_cx(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected a complex number as [re, im]");
  return cx(j[0].get<double>(), j[1].get<double>());
}

Mat parse_matrix(const json& j, int rows, int cols) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) throw ParseError("matrix row count mismatch");
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
      throw ParseError("matrix column count mismatch");
    for (int c = 0; c < cols; ++c) m(i, c) = parse_cx(j[i][c]);
  }
  return m;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

}  // namespace

WienerPlusFunction ProblemSpec::build_g(const std::string& base_dir) const {
  if (d.rows() != m || d.cols() != p) throw ParseError("ProblemSpec: D must be m x p");
  if (!terms.empty()) {
    if (!samples_file.empty()) {
      CausalKernel k = read_kernel_csv((fs::path(base_dir) / samples_file).string());
      return WienerPlusFunction(d, CausalKernel::from_samples_and_terms(k.grid(), k.samples(), terms));
    }
    return WienerPlusFunction(d, CausalKernel::from_exp_sum(grid, terms));
  }
  if (!samples_file.empty()) {
    CausalKernel k = read_kernel_csv((fs::path(base_dir) / samples_file).string());
    if (k.rows() != m || k.cols() != p) throw ParseError("ProblemSpec: kernel sample dimensions mismatch");
    if (k.grid() != grid) throw ParseError("ProblemSpec: kernel sample grid disagrees with grid settings");
    return WienerPlusFunction(d, k);
  }
  return WienerPlusFunction(d, CausalKernel::zero(m, p, grid));
}

ProblemSpec parse_problem_spec(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    ProblemSpec spec;
    spec.m = j.at("m").get<int>();
    spec.p = j.at("p").get<int>();
    if (spec.m < 1 || spec.p < spec.m) throw ParseError("need 1 <= m <= p");
    spec.d = parse_matrix(j.at("D"), spec.m, spec.p);
    if (j.contains("grid")) {
      double h = j["grid"].value("h", 0.01);
      double horizon = j["grid"].value("T", 30.0);
      spec.grid = TimeGrid::from_horizon(h, horizon);
    }
    if (j.contains("freq")) {
      spec.omega_max = j["freq"].value("omega_max", 50.0);
      spec.freq_count = j["freq"].value("count", 2001);
    }
    if (j.contains("tolerances") && j["tolerances"].contains("identity"))
      spec.tolerance = j["tolerances"]["identity"].get<double>();
    if (j.contains("kernel")) {
      const json& k = j["kernel"];
      if (k.contains("terms")) {
        for (const auto& t : k["terms"]) {
          ExpTerm term;
          term.pole = parse_cx(t.at("pole"));
          term.coeff = parse_matrix(t.at("coeff"), spec.m, spec.p);
          spec.terms.push_back(std::move(term));
        }
      }
      if (k.contains("samples")) spec.samples_file = k["samples"].get<std::string>();
    }
    return spec;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed problem spec: ") + e.what());
  }
}

ProblemSpec load_problem_spec(const std::string& path) { return parse_problem_spec(read_file(path)); }

std::string problem_spec_to_json(const ProblemSpec& spec) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"m\": " << spec.m << ",\n";
  os << "  \"p\": " << spec.p << ",\n";
  os << "  \"D\": " << format_matrix(spec.d) << ",\n";
  os << "  \"kernel\": {";
  bool first = true;
  if (!spec.terms.empty()) {
    os << "\"terms\": [";
    for (size_t k = 0; k < spec.terms.size(); ++k) {
      if (k) os << ", ";
      os << "{\"coeff\": " << format_matrix(spec.terms[k].coeff)
         << ", \"pole\": " << format_cx(spec.terms[k].pole) << "}";
    }
    os << "]";
    first = false;
  }
  if (!spec.samples_file.empty()) {
    if (!first) os << ", ";
    os << "\"samples\": \"" << spec.samples_file << "\"";
  }
  os << "},\n";
  os << "  \"grid\": {\"h\": " << format_double(spec.grid.h)
     << ", \"T\": " << format_double(spec.grid.horizon()) << "},\n";
  os << "  \"freq\": {\"omega_max\": " << format_double(spec.omega_max)
     << ", \"count\": " << spec.freq_count << "}";
  if (spec.tolerance > 0.0)
    os << ",\n  \"tolerances\": {\"identity\": " << format_double(spec.tolerance) << "}";
  os << "\n}\n";
  return os.str();
}

void write_kernel_csv(const std::string& path, const CausalKernel& k) {
  std::ostringstream os;
  os << "t";
  for (int i = 0; i < k.rows(); ++i)
    for (int j = 0; j < k.cols(); ++j) os << ", re_" << i << "_" << j << ", im_" << i << "_" << j;
  os << "\n";
  for (int n = 0; n < k.grid().n; ++n) {
    os << format_double(k.grid().t(n));
    for (int i = 0; i < k.rows(); ++i)
      for (int j = 0; j < k.cols(); ++j) {
        cx v = k.sample(n)(i, j);
        os << ", " << format_double(v.real()) << ", " << format_double(v.imag());
      }
    os << "\n";
  }
  write_file(path, os.str());
}

CausalKernel read_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open kernel file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty kernel file: " + path);

  // header: t, re_i_j, im_i_j ... row-major
  int rows = 0, cols = 0;
  {
    std::istringstream hs(line);
    std::string tok;
    bool first = true;
    while (std::getline(hs, tok, ',')) {
      size_t a = tok.find_first_not_of(" \t\r");
      size_t b = tok.find_last_not_of(" \t\r");
      tok = a == std::string::npos ? "" : tok.substr(a, b - a + 1);
      if (first) {
        if (tok != "t") throw ParseError("kernel file must start with a 't' column");
        first = false;
        continue;
      }
      int i, j;
      if (std::sscanf(tok.c_str(), "re_%d_%d", &i, &j) == 2 ||
          std::sscanf(tok.c_str(), "im_%d_%d", &i, &j) == 2) {
        rows = std::max(rows, i + 1);
        cols = std::max(cols, j + 1);
      } else {
        throw ParseError("unrecognized kernel column: " + tok);
      }
    }
  }
  if (rows == 0 || cols == 0) throw ParseError("kernel file has no entry columns");

  std::vector<double> times;
  std::vector<Mat> samples;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<double> vals;
    while (std::getline(ls, tok, ',')) vals.push_back(std::stod(tok));
    if (static_cast<int>(vals.size()) != 1 + 2 * rows * cols)
      throw ParseError("kernel row has wrong number of values");
    times.push_back(vals[0]);
    Mat s(rows, cols);
    int idx = 1;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        s(i, j) = cx(vals[idx], vals[idx + 1]);
        idx += 2;
      }
    samples.push_back(std::move(s));
  }
  if (times.size() < 2) throw ParseError("kernel file needs at least two samples");
  if (std::abs(times[0]) > 1e-12) throw ParseError("kernel samples must start at t = 0");
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw ParseError("kernel time column must be strictly increasing");
  for (size_t i = 1; i < times.size(); ++i)
    if (std::abs(times[i] - times[i - 1] - h) > 1e-9 * std::max(1.0, h))
      throw ParseError("kernel time column must have a uniform step");
  return CausalKernel::from_samples(TimeGrid(h, static_cast<int>(times.size())), std::move(samples));
}

void write_operator_csv(const std::string& path, const Mat& dense) {
  std::ostringstream os;
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (j) os << ", ";
      os << format_double(dense(i, j).real()) << ", " << format_double(dense(i, j).imag());
    }
    os << "\n";
  }
  write_file(path, os.str());
}

void write_traces_csv(const std::string& path, const BezoutSolution& sol, const FrequencyGrid& freq) {
  std::ostringstream os;
  os << "omega";
  auto header = [&os](const char* name, int rows, int cols) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        os << ", " << name << "_re_" << i << "_" << j << ", " << name << "_im_" << i << "_" << j;
  };
  header("Xi", sol.p(), sol.m());
  header("Theta", sol.p(), sol.p() - sol.m());
  header("Y", sol.p(), sol.p());
  os << "\n";
  auto emit = [&os](const Mat& v) {
    for (Eigen::Index i = 0; i < v.rows(); ++i)
      for (Eigen::Index j = 0; j < v.cols(); ++j)
        os << ", " << format_double(v(i, j).real()) << ", " << format_double(v(i, j).imag());
  };
  for (double omega : freq.omegas) {
    cx s(0.0, omega);
    os << format_double(omega);
    emit(eval_wiener(sol.xi, s));
    emit(eval_wiener(sol.theta, s));
    emit(eval_wiener(sol.Y, s));
    os << "\n";
  }
  write_file(path, os.str());
}

void write_solution_bundle(const std::string& dir, const ProblemSpec& spec, const BezoutSolution& sol,
                           const FrequencyGrid& freq) {
  fs::create_directories(dir);
  ProblemSpec embedded = spec;
  // keep the bundle self-contained: always materialize the kernel samples
  write_kernel_csv((fs::path(dir) / "g.csv").string(), sol.g.kernel());
  embedded.samples_file = "g.csv";
  write_kernel_csv((fs::path(dir) / "y.csv").string(), sol.y);
  write_traces_csv((fs::path(dir) / "traces.csv").string(), sol, freq);

  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": \"wiener-bezout/solution-v1\",\n";
  {
    std::istringstream ps(problem_spec_to_json(embedded));
    std::string line;
    os << "  \"problem\": ";
    bool first = true;
    while (std::getline(ps, line)) {
      if (!first) os << "\n  ";
      os << line;
      first = false;
    }
    os << ",\n";
  }
  os << "  \"pointers\": {\"d_plus\": " << format_matrix(sol.pointers.d_plus)
     << ", \"e\": " << format_matrix(sol.pointers.e) << "},\n";
  os << "  \"diagnostics\": {\"lambda_min\": " << format_double(sol.diagnostics.lambda_min)
     << ", \"route_a\": " << (sol.diagnostics.route_a ? "true" : "false")
     << ", \"route_b\": " << (sol.diagnostics.route_b ? "true" : "false")
     << ", \"solver_residual\": " << format_double(sol.diagnostics.solver_residual)
     << ", \"theta_columns\": " << (sol.p() - sol.m()) << "},\n";
  os << "  \"y\": {\"samples\": \"y.csv\"}\n";
  os << "}\n";
  write_file((fs::path(dir) / "solution.json").string(), os.str());
}

SolutionBundle load_solution_bundle(const std::string& dir) {
  const std::string solpath = (fs::path(dir) / "solution.json").string();
  json j;
  try {
    j = json::parse(read_file(solpath));
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid solution.json: ") + e.what());
  }
  SolutionBundle bundle;
  try {
    bundle.spec = parse_problem_spec(j.at("problem").dump());
    WienerPlusFunction g = bundle.spec.build_g(dir);
    std::string yfile = j.at("y").at("samples").get<std::string>();
    CausalKernel y = read_kernel_csv((fs::path(dir) / yfile).string());
    if (y.rows() != bundle.spec.p || y.cols() != bundle.spec.p)
      throw ParseError("bundle y.csv has wrong dimensions");
    if (y.grid() != g.grid()) throw ParseError("bundle y.csv grid disagrees with the problem grid");
    SolverDiagnostics diag;
    const json& d = j.at("diagnostics");
    diag.lambda_min = d.at("lambda_min").get<double>();
    diag.route_a = d.at("route_a").get<bool>();
    diag.route_b = d.at("route_b").get<bool>();
    diag.solver_residual = d.at("solver_residual").get<double>();
    bundle.sol = assemble(g, y, diag);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed solution bundle: ") + e.what());
  }
  return bundle;
}

void write_report_json(const std::string& path, const ResidualReport& report) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema\": \"wiener-bezout/report-v1\",\n";
  os << "  \"overall_pass\": " << (report.overall() ? "true" : "false") << ",\n";
  os << "  \"grid\": {\"h\": " << format_double(report.grid_h)
     << ", \"T\": " << format_double(report.grid_horizon) << "},\n";
  os << "  \"freq\": {\"omega_max\": " << format_double(report.omega_max)
     << ", \"count\": " << report.freq_count << "},\n";
  os << "  \"checks\": [\n";
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    os << "    {\"id\": \"" << e.id << "\", \"residual\": " << format_double(e.residual)
       << ", \"tolerance\": " << format_double(e.tolerance)
       << ", \"pass\": " << (e.pass ? "true" : "false") << ", \"note\": \"" << e.note << "\"}";
    if (i + 1 < report.entries.size()) os << ",";
    os << "\n";
  }
  os << "  ]\n}\n";
  write_file(path, os.str());
}

void write_report_csv(const std::string& path, const ResidualReport& report) {
  std::ostringstream os;
  os << "check, residual, tolerance, pass\n";
  for (const auto& e : report.entries)
    os << e.id << ", " << format_double(e.residual) << ", " << format_double(e.tolerance) << ", "
       << (e.pass ? "1" : "0") << "\n";
  write_file(path, os.str());
}

}  // namespace wbz
