#ifndef WBZ_ORACLE_HPP
#define WBZ_ORACLE_HPP

#include "wbz/solver.hpp"

namespace wbz {

// Closed-form family with m = 1, p = 2: D = [1, 0], g = [0, c e^{-b t}].
// Everything the pipeline computes has an exact exponential-sum counterpart
// here, with a = sqrt(b^2 + c^2).
struct WorkedInstance {
  double b = 0.0, c = 0.0, a = 0.0;
  WienerPlusFunction g;
  CausalKernel y;
  WienerPlusFunction Y;
  WienerPlusFunction y_inverse;
  WienerPlusFunction xi;
  WienerPlusFunction theta;
  Pointers pointers;

  cx det_Y(cx s) const { return (s + b) / (s + a); }
};

WorkedInstance worked_family(double b, double c, const TimeGrid& grid);

struct DualGridReport {
  double coarse_error = 0.0;      // sup norm against the exact kernel (if given)
  double fine_error = 0.0;
  double successive_diff = 0.0;   // sup norm of y_h - y_{h/2} on the coarse nodes
  double order = 0.0;             // empirical convergence order
};

// Computes y on the grid and on its refinement and reports convergence data.
DualGridReport dual_grid_compare(const WienerPlusFunction& g, const TimeGrid& grid,
                                 const SolveConfig& cfg = {}, const CausalKernel* exact = nullptr);

// Alternative route to y: f = (T_G T_G^*)^{-1} g computed via the inversion
// formula T_R^{-1} + T_R^{-1} H (I - H^* T_R^{-1} H)^{-1} H^* T_R^{-1}, where
// T_R here is the finite-section sum T_G T_G^* + H H^* so the identity is
// exact in finite dimensions.
CausalKernel schur_path_y(const WienerPlusFunction& g, const TimeGrid& grid,
                          const SolveConfig& cfg = {});

}  // namespace wbz

#endif
