#ifndef WBZ_DIAGNOSTICS_HPP
#define WBZ_DIAGNOSTICS_HPP

#include <array>

#include "wbz/rng.hpp"
#include "wbz/solver.hpp"

namespace wbz {

// Fixed registry: every identity proved in scope maps to exactly one check.
inline constexpr std::array<const char*, 12> kCheckRegistry = {
    "bezout",     "gy_equals_d",   "inner",         "tolokonnikov",
    "winding",    "kernel_identity", "anticausality", "pythagoras",
    "decomposition", "kappa_bounds", "hankel_rank",   "schur_route"};

struct ResidualEntry {
  std::string id;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

struct ResidualReport {
  std::vector<ResidualEntry> entries;
  double omega_max = 0.0;
  int freq_count = 0;
  double grid_h = 0.0;
  double grid_horizon = 0.0;

  bool overall() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  const ResidualEntry* find(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return &e;
    return nullptr;
  }
};

double default_tolerance(double solver_residual);

ResidualEntry residual_bezout(const WienerPlusFunction& g, const WienerPlusFunction& x,
                              const FrequencyGrid& freq, double tol);
ResidualEntry residual_gy_equals_d(const WienerPlusFunction& g, const WienerPlusFunction& y,
                                   const FrequencyGrid& freq, double tol);
ResidualEntry residual_inner(const WienerPlusFunction& theta, const FrequencyGrid& freq, double tol);

struct WindingResult {
  int winding = 0;
  double min_abs_det = 0.0;
  double max_phase_step = 0.0;
  bool reliable = false;
};

// Net change of arg det Y along the axis, closed through det Y(inf) = 1.
WindingResult winding_det_Y(const WienerPlusFunction& y, const FrequencyGrid& freq);
ResidualEntry winding_entry(const WienerPlusFunction& y, const FrequencyGrid& freq,
                            double min_det_tol = 1e-6);

ResidualEntry residual_tolokonnikov(const BezoutSolution& sol, const FrequencyGrid& freq, double tol);

struct AnticausalityResult {
  double ratio = 0.0;       // L2 mass on (2h, T] over total mass on [-T, T]
  double total_mass = 0.0;
};
AnticausalityResult anticausality_mass(const std::function<Mat(double)>& axis_fn, int rows, int cols,
                                       const TimeGrid& grid);
AnticausalityResult anticausality_theta_star_xi(const BezoutSolution& sol);
ResidualEntry anticausality_entry(const BezoutSolution& sol, double tol);

struct PythagorasResult {
  double p1 = 0.0;  // || X u - X(inf) u ||^2 in H^2
  double p2 = 0.0;  // same for Xi
  double p3 = 0.0;  // same for Z
  double cross = 0.0;
  double rel_error = 0.0;
  double cross_rel = 0.0;
};
PythagorasResult pythagoras_minimality(const BezoutSolution& sol, const SolutionParameter& z,
                                       const Vec& u, const FrequencyGrid& freq);

ResidualEntry kernel_identity_entry(const BezoutSolution& sol, double tol,
                                    const SolveConfig& cfg = {});

std::vector<ResidualEntry> appendix_operator_checks(const WienerPlusFunction& g, const TimeGrid& grid,
                                                    const SolveConfig& cfg = {});

// Random strictly proper exponential-sum parameter for property tests.
WienerPlusFunction random_strictly_proper(int rows, int cols, const TimeGrid& grid, Rng& rng);

struct VerifyOptions {
  bool full = false;
  double tolerance = 0.0;  // 0: derive from solver residual
  int pythagoras_draws = 20;
  unsigned seed = 20240809;
  SolveConfig solve;
};

ResidualReport run_verification(const BezoutSolution& sol, const FrequencyGrid& freq,
                                const VerifyOptions& opts = {});

}  // namespace wbz

#endif
