#ifndef WBZ_IO_HPP
#define WBZ_IO_HPP

#include "wbz/diagnostics.hpp"

namespace wbz {

// Fixed %.12e rendering so identical runs produce byte-identical files.
std::string format_double(double v);
std::string format_cx_json(cx v);
std::string format_matrix_json(const Mat& m);

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  int m = 0, p = 0;
  Mat d;
  std::vector<ExpTerm> terms;  // exponential-sum kernel, may be empty
  std::string samples_file;    // CSV kernel samples, may be empty
  TimeGrid grid{0.01, 3001};
  double omega_max = 50.0;
  int freq_count = 2001;
  double tolerance = 0.0;  // 0: derive from solver residual

  WienerPlusFunction build_g(const std::string& base_dir = ".") const;
  FrequencyGrid build_freq() const { return FrequencyGrid::symmetric(omega_max, freq_count); }
};

ProblemSpec parse_problem_spec(const std::string& json_text);
ProblemSpec load_problem_spec(const std::string& path);
std::string problem_spec_to_json(const ProblemSpec& spec);

// Kernel sample files: header `t, re_0_0, im_0_0, ...` row-major over entries,
// uniform strictly increasing time column.
void write_kernel_csv(const std::string& path, const CausalKernel& k);
CausalKernel read_kernel_csv(const std::string& path);

void write_operator_csv(const std::string& path, const Mat& dense);

struct SolutionBundle {
  ProblemSpec spec;
  BezoutSolution sol;
};

void write_solution_bundle(const std::string& dir, const ProblemSpec& spec, const BezoutSolution& sol,
                           const FrequencyGrid& freq);
SolutionBundle load_solution_bundle(const std::string& dir);

void write_traces_csv(const std::string& path, const BezoutSolution& sol, const FrequencyGrid& freq);
void write_report_json(const std::string& path, const ResidualReport& report);
void write_report_csv(const std::string& path, const ResidualReport& report);

}  // namespace wbz

#endif
