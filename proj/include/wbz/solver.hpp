#ifndef WBZ_SOLVER_HPP
#define WBZ_SOLVER_HPP

#include "wbz/operator.hpp"

namespace wbz {

// D^+ = D^*(DD^*)^{-1} and an isometric basis E of ker D, with a fixed sign
// convention so outputs are reproducible.
struct Pointers {
  Mat d_plus;  // p x m
  Mat e;       // p x (p-m)
};

struct SurjectivityFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotRightInvertible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RouteDisagreement : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Pointers right_pointers(const Mat& d);

struct SolveConfig {
  SpdSolveConfig spd;
  double positivity_threshold = 1e-8;  // relative to the top of the spectrum
};

struct Certification {
  double lambda_min = 0.0;  // bottom of spec(T_G T_G^*)
  double lambda_max = 0.0;
  bool route_a = false;
  bool route_b = false;
  double lambda_min_tr = 0.0;
  double lambda_max_tr = 0.0;
  double lambda_min_schur = 0.0;  // bottom of spec(I - H^* T_R^{-1} H)
  bool certified() const { return route_a && route_b; }
};

// Both characterizations of right invertibility: route A tests T_G T_G^* > 0
// directly, route B tests T_R > 0 and I - H^* T_R^{-1} H > 0. A disagreement
// throws RouteDisagreement carrying both spectral edges.
Certification certify_right_invertible(const WienerPlusFunction& g, const TimeGrid& grid,
                                       const SolveConfig& cfg = {});

struct ComputedY {
  CausalKernel y;  // p x p
  double solver_residual = 0.0;
};

// y = T_G^*(T_G T_G^*)^{-1} g, column by column.
ComputedY compute_y(const WienerPlusFunction& g, const TimeGrid& grid, const SolveConfig& cfg = {});

struct SolverDiagnostics {
  double lambda_min = 0.0;
  bool route_a = false;
  bool route_b = false;
  double solver_residual = 0.0;
};

struct BezoutSolution {
  WienerPlusFunction g;  // the problem data
  Pointers pointers;
  CausalKernel y;
  WienerPlusFunction Y;      // I - yhat
  WienerPlusFunction xi;     // Y D^+
  WienerPlusFunction theta;  // Y E
  SolverDiagnostics diagnostics;

  int m() const { return g.rows(); }
  int p() const { return g.cols(); }
  const TimeGrid& grid() const { return g.grid(); }
};

BezoutSolution assemble(const WienerPlusFunction& g, const CausalKernel& y,
                        const SolverDiagnostics& diag = {});

// certify + compute_y + assemble; throws NotRightInvertible when
// certification fails.
BezoutSolution solve_bezout(const WienerPlusFunction& g, const TimeGrid& grid,
                            const SolveConfig& cfg = {});

Mat eval_Y(const BezoutSolution& sol, cx s);
Mat eval_Y_inverse(const BezoutSolution& sol, double omega);
Mat eval_Y_inverse_at(const BezoutSolution& sol, cx s);

struct SolutionParameter {
  WienerPlusFunction z;  // (p-m) x m
  bool strictly_proper = false;
};

SolutionParameter make_parameter(WienerPlusFunction z);

// X = Xi + Theta Z.
WienerPlusFunction parametrize(const BezoutSolution& sol, const SolutionParameter& z);

// Z(i w) = E^* Y(i w)^{-1} (X(i w) - Xi(i w)); the kernel is recovered by an
// inverse transform so the parameter round-trips through parametrize.
SolutionParameter recover_parameter(const BezoutSolution& sol, const WienerPlusFunction& x,
                                    const FrequencyGrid& freq);

}  // namespace wbz

#endif
