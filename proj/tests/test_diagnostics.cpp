#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/test_util.hpp"
#include "wbz/diagnostics.hpp"

using namespace wbz;
using wbz::test::g0;

namespace {

BezoutSolution solved_g0(const TimeGrid& grid) {
  WorkedInstance w = worked_family(1.0, 1.0, grid);
  ComputedY y = compute_y(w.g, grid);
  SolverDiagnostics diag{1.0, true, true, y.solver_residual};
  return assemble(w.g, y.y, diag);
}

}  // namespace

TEST_CASE("bezout residual: exact, discretized, and failing inputs") {
  TimeGrid grid(0.05, 201);
  FrequencyGrid freq = FrequencyGrid::symmetric(20.0, 401);
  Mat d(1, 2), xc(2, 1);
  d << 1.0, 0.0;
  xc << 1.0, 0.0;
  WienerPlusFunction g = WienerPlusFunction::constant_only(d, grid);
  WienerPlusFunction x = WienerPlusFunction::constant_only(xc, grid);
  CHECK(residual_bezout(g, x, freq, 1e-3).residual == 0.0);

  WienerPlusFunction zero = WienerPlusFunction::constant_only(Mat::Zero(2, 1), grid);
  ResidualEntry fail = residual_bezout(g, zero, freq, 1e-3);
  CHECK(fail.residual == doctest::Approx(1.0));
  CHECK(!fail.pass);
}

TEST_CASE("worked family residuals at h=0.01, T=30 stay under 1e-3 and shrink with h") {
  TimeGrid grid(0.01, 3001);
  FrequencyGrid freq = FrequencyGrid::symmetric(50.0, 2001);
  BezoutSolution sol = solved_g0(grid);

  ResidualEntry bez = residual_bezout(sol.g, sol.xi, freq, 1e-3);
  CHECK(bez.pass);
  ResidualEntry gy = residual_gy_equals_d(sol.g, sol.Y, freq, 1e-3);
  CHECK(gy.pass);
  ResidualEntry inner = residual_inner(sol.theta, freq, 1e-3);
  CHECK(inner.pass);
  ResidualEntry tol = residual_tolokonnikov(sol, freq, 1e-3);
  CHECK(tol.pass);

  TimeGrid coarse(0.02, 1501);
  BezoutSolution sol2 = solved_g0(coarse);
  ResidualEntry gy2 = residual_gy_equals_d(sol2.g, sol2.Y, freq, 1e-2);
  CHECK(gy2.residual / gy.residual >= 2.0);  // trapezoid, expect about 4
}

TEST_CASE("inner residual: exact isometry and a broken one") {
  TimeGrid grid(0.05, 201);
  FrequencyGrid freq = FrequencyGrid::symmetric(10.0, 101);
  Mat e(2, 1);
  e << 0.0, 1.0;
  WienerPlusFunction theta = WienerPlusFunction::constant_only(e, grid);
  CHECK(residual_inner(theta, freq, 1e-3).residual == 0.0);

  WienerPlusFunction doubled = WienerPlusFunction::constant_only(Mat(2.0 * e), grid);
  ResidualEntry fail = residual_inner(doubled, freq, 1e-3);
  CHECK(fail.residual == doctest::Approx(3.0));
  CHECK(!fail.pass);
}

TEST_CASE("winding of det Y") {
  TimeGrid grid(0.01, 2001);
  FrequencyGrid freq = FrequencyGrid::symmetric(50.0, 2001);
  SUBCASE("identity") {
    WienerPlusFunction y = WienerPlusFunction::constant_only(Mat::Identity(2, 2), grid);
    WindingResult w = winding_det_Y(y, freq);
    CHECK(w.winding == 0);
    CHECK(w.reliable);
    CHECK(w.min_abs_det == doctest::Approx(1.0));
  }
  SUBCASE("worked family: winding 0, min |det| = 1/sqrt(2)") {
    WorkedInstance w = worked_family(1.0, 1.0, grid);
    WindingResult res = winding_det_Y(w.Y, freq);
    CHECK(res.winding == 0);
    CHECK(res.reliable);
    CHECK(res.min_abs_det == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("synthetic right-half-plane zero: winding -1") {
    // det Y = (s - 1)/(s + sqrt 2) via Y = diag(1, (s-1)/(s+sqrt2))
    double a = std::sqrt(2.0);
    Mat c = Mat::Zero(2, 2);
    c(1, 1) = -(1.0 + a);
    WienerPlusFunction y(Mat::Identity(2, 2),
                         CausalKernel::from_exp_sum(grid, {{c, cx(a, 0.0)}}));
    WindingResult res = winding_det_Y(y, freq);
    CHECK(res.reliable);
    CHECK(res.winding == -1);
    ResidualEntry entry = winding_entry(y, freq);
    CHECK(!entry.pass);
  }
  SUBCASE("coarse grids are flagged unreliable") {
    double a = std::sqrt(2.0);
    Mat c = Mat::Zero(2, 2);
    c(1, 1) = -(1.0 + a);
    WienerPlusFunction y(Mat::Identity(2, 2),
                         CausalKernel::from_exp_sum(grid, {{c, cx(a, 0.0)}}));
    FrequencyGrid tiny = FrequencyGrid::symmetric(50.0, 5);
    WindingResult res = winding_det_Y(y, tiny);
    CHECK(!res.reliable);
  }
}

TEST_CASE("tolokonnikov residual fails for a non-isometric E") {
  TimeGrid grid(0.02, 1001);
  FrequencyGrid freq = FrequencyGrid::symmetric(20.0, 401);
  BezoutSolution sol = solved_g0(grid);
  BezoutSolution broken = sol;
  broken.pointers.e *= 1.25;
  broken.theta = WienerPlusFunction(broken.pointers.e,
                                    sol.y.scaled(cx(-1, 0)).right_multiplied(broken.pointers.e));
  ResidualEntry entry = residual_tolokonnikov(broken, freq, 1e-3);
  CHECK(!entry.pass);
  CHECK(entry.residual >= 0.2);
}

TEST_CASE("anticausality of Theta^* Xi") {
  SUBCASE("square case is trivially zero") {
    TimeGrid grid(0.02, 501);
    Mat d = Mat::Identity(2, 2);
    Mat c(2, 2);
    c << 0.3, 0.0, 0.1, 0.2;
    WienerPlusFunction g(d, CausalKernel::from_exp_sum(grid, {{c, cx(1.0, 0.0)}}));
    BezoutSolution sol = solve_bezout(g, grid);
    AnticausalityResult r = anticausality_theta_star_xi(sol);
    CHECK(r.ratio == 0.0);
    CHECK(r.total_mass < 1e-14);
  }
  SUBCASE("worked family: mass 1/(2 sqrt 2), ratio below 1e-3") {
    TimeGrid grid(0.01, 3001);
    BezoutSolution sol = solved_g0(grid);
    AnticausalityResult r = anticausality_theta_star_xi(sol);
    CHECK(r.ratio <= 1e-3);
    CHECK(r.total_mass == doctest::Approx(1.0 / (2.0 * std::sqrt(2.0))).epsilon(0.02));
  }
  SUBCASE("a causal function fails with ratio near 1") {
    TimeGrid grid(0.01, 2001);
    auto causal = [](double omega) -> Mat {
      Mat m(1, 1);
      m(0, 0) = 1.0 / (cx(1.0, omega));  // transform of e^{-t} 1_{t>0}
      return m;
    };
    AnticausalityResult r = anticausality_mass(causal, 1, 1, grid);
    CHECK(r.ratio > 0.8);
  }
}

TEST_CASE("pythagoras identity on strictly proper parts") {
  TimeGrid grid(0.01, 3001);
  FrequencyGrid freq = FrequencyGrid::symmetric(50.0, 2001);
  BezoutSolution sol = solved_g0(grid);
  Vec u = Vec::Ones(1);

  SUBCASE("Z = 0: P1 = P2, P3 = 0") {
    SolutionParameter z = make_parameter(WienerPlusFunction::constant_only(Mat::Zero(1, 1), grid));
    PythagorasResult r = pythagoras_minimality(sol, z, u, freq);
    CHECK(r.p3 == 0.0);
    CHECK(r.cross == 0.0);
    CHECK(std::abs(r.p1 - r.p2) <= 1e-12);
  }
  SUBCASE("Z = 1/(s+1), u = 1: P1 = P3 = 1/2, P2 = 0") {
    Mat one(1, 1);
    one << 1.0;
    SolutionParameter z = make_parameter(
        WienerPlusFunction(Mat::Zero(1, 1), CausalKernel::from_exp_sum(grid, {{one, cx(1.0, 0.0)}})));
    PythagorasResult r = pythagoras_minimality(sol, z, u, freq);
    CHECK(r.p2 <= 1e-6);
    CHECK(r.p1 == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(r.p3 == doctest::Approx(0.5).epsilon(2e-3));
    CHECK(r.rel_error <= 1e-3);
    CHECK(r.cross_rel <= 1e-3);
  }
  SUBCASE("random strictly proper parameters satisfy the identity") {
    Rng rng(77);
    for (int draw = 0; draw < 20; ++draw) {
      SolutionParameter z = make_parameter(random_strictly_proper(1, 1, grid, rng));
      Vec uu = rng.cgaussian_vector(1);
      uu /= uu.norm();
      PythagorasResult r = pythagoras_minimality(sol, z, uu, freq);
      CHECK(r.rel_error <= 1e-3);
      CHECK(r.cross_rel <= 1e-3);
    }
  }
  SUBCASE("a parameter with a constant part is rejected") {
    Mat one(1, 1);
    one << 1.0;
    SolutionParameter z = make_parameter(WienerPlusFunction::constant_only(one, grid));
    CHECK_THROWS_AS(pythagoras_minimality(sol, z, u, freq), std::invalid_argument);
  }
}

TEST_CASE("kernel identity || T_G T_Theta || and the null-space spot check") {
  TimeGrid grid(0.01, 3001);
  BezoutSolution sol = solved_g0(grid);
  ResidualEntry entry = kernel_identity_entry(sol, 1e-3);
  CHECK(entry.pass);
}

TEST_CASE("appendix operator checks for the worked family") {
  TimeGrid grid(0.01, 2001);
  WienerPlusFunction g = g0(grid);
  auto entries = appendix_operator_checks(g, grid);
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].id == "kappa_bounds");
  CHECK(entries[0].pass);
  CHECK(entries[0].residual <= 1.05);  // |W|, |H| vs kappa = 1
  CHECK(entries[1].id == "hankel_rank");
  CHECK(entries[1].pass);
  CHECK(entries[2].pass);  // schur positivity consistent with route B
}

TEST_CASE("full verification report covers the registry in order") {
  TimeGrid grid(0.02, 1001);  // T = 20
  BezoutSolution sol = solved_g0(grid);
  FrequencyGrid freq = FrequencyGrid::symmetric(50.0, 2001);
  VerifyOptions opts;
  opts.full = true;
  opts.pythagoras_draws = 5;
  opts.tolerance = 4e-3;  // h = 0.02 discretization level
  ResidualReport report = run_verification(sol, freq, opts);
  REQUIRE(report.entries.size() == kCheckRegistry.size());
  for (size_t i = 0; i < report.entries.size(); ++i) CHECK(report.entries[i].id == kCheckRegistry[i]);
  for (const auto& e : report.entries) {
    INFO(e.id, " residual ", e.residual, " tol ", e.tolerance, " note ", e.note);
    CHECK(e.pass);
  }
  CHECK(report.overall());
}

TEST_CASE("failure injection flips the report overall flag") {
  TimeGrid grid(0.02, 1001);
  BezoutSolution sol = solved_g0(grid);
  FrequencyGrid freq = FrequencyGrid::symmetric(20.0, 401);
  // hand-edited non-isometric E
  sol.pointers.e *= 1.3;
  sol.theta = WienerPlusFunction(sol.pointers.e, sol.y.scaled(cx(-1, 0)).right_multiplied(sol.pointers.e));
  VerifyOptions opts;
  opts.tolerance = 4e-3;
  ResidualReport report = run_verification(sol, freq, opts);
  CHECK(!report.overall());
  CHECK(!report.find("inner")->pass);
  CHECK(!report.find("tolokonnikov")->pass);
}
