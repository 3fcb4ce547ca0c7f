#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/test_util.hpp"
#include "wbz/diagnostics.hpp"

using namespace wbz;
using wbz::test::g0;

TEST_CASE("right_pointers: worked instances and the block identity") {
  SUBCASE("D = [1, 0]") {
    Mat d(1, 2);
    d << 1.0, 0.0;
    Pointers ptr = right_pointers(d);
    Mat dplus(2, 1), e(2, 1);
    dplus << 1.0, 0.0;
    e << 0.0, 1.0;
    CHECK((ptr.d_plus - dplus).norm() < 1e-14);
    CHECK((ptr.e - e).norm() < 1e-14);
    Mat stacked(2, 2), wide(2, 2);
    stacked.topRows(1) = d;
    stacked.bottomRows(1) = ptr.e.adjoint();
    wide.leftCols(1) = ptr.d_plus;
    wide.rightCols(1) = ptr.e;
    CHECK((stacked * wide - Mat::Identity(2, 2)).norm() < 1e-10);
  }
  SUBCASE("square full-rank D has an empty E") {
    Mat d = Mat::Identity(3, 3);
    Pointers ptr = right_pointers(d);
    CHECK((ptr.d_plus - Mat::Identity(3, 3)).norm() < 1e-14);
    CHECK(ptr.e.cols() == 0);
  }
  SUBCASE("D = [0, 2]") {
    Mat d(1, 2);
    d << 0.0, 2.0;
    Pointers ptr = right_pointers(d);
    Mat dplus(2, 1), e(2, 1);
    dplus << 0.0, 0.5;
    e << 1.0, 0.0;
    CHECK((ptr.d_plus - dplus).norm() < 1e-14);
    CHECK((ptr.e - e).norm() < 1e-14);
  }
  SUBCASE("random wide D satisfies all pointer identities") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      int m = 1 + static_cast<int>(rng.uniform() * 3.0);
      int p = m + static_cast<int>(rng.uniform() * 3.0);
      Mat d = rng.cgaussian_matrix(m, p);
      Pointers ptr = right_pointers(d);
      CHECK((d * ptr.d_plus - Mat::Identity(m, m)).norm() < 1e-12);
      CHECK((d * ptr.e).norm() < 1e-12);
      CHECK((ptr.e.adjoint() * ptr.e - Mat::Identity(p - m, p - m)).norm() < 1e-12);
      Mat stacked(p, p), wide(p, p);
      stacked.topRows(m) = d;
      stacked.bottomRows(p - m) = ptr.e.adjoint();
      wide.leftCols(m) = ptr.d_plus;
      wide.rightCols(p - m) = ptr.e;
      CHECK((stacked * wide - Mat::Identity(p, p)).norm() < 1e-10);
    }
  }
  SUBCASE("rank-deficient D is a surjectivity failure") {
    Mat d = Mat::Zero(1, 2);
    CHECK_THROWS_AS(right_pointers(d), SurjectivityFailure);
    Mat d2(2, 3);
    d2 << 1.0, 0.0, 0.0, 1.0, 0.0, 0.0;  // second row parallel to the first
    CHECK_THROWS_AS(right_pointers(d2), SurjectivityFailure);
  }
}

TEST_CASE("certification: worked family, constant case, non-surjective case") {
  SUBCASE("G0 certifies on both routes with lambda_min near 1") {
    TimeGrid grid(0.02, 751);
    Certification cert = certify_right_invertible(g0(grid), grid);
    CHECK(cert.route_a);
    CHECK(cert.route_b);
    CHECK(cert.lambda_min == doctest::Approx(1.0).epsilon(0.05));
  }
  SUBCASE("constant D = [1, 0] gives exactly lambda_min = 1") {
    TimeGrid grid(0.05, 201);
    Mat d(1, 2);
    d << 1.0, 0.0;
    Certification cert =
        certify_right_invertible(WienerPlusFunction::constant_only(d, grid), grid);
    CHECK(cert.route_a);
    CHECK(cert.route_b);
    CHECK(cert.lambda_min == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("D = [0, 0] with g = [0, e^{-t}] fails both routes") {
    TimeGrid grid(0.01, 3001);
    Mat d = Mat::Zero(1, 2);
    Mat c(1, 2);
    c << 0.0, 1.0;
    WienerPlusFunction g(d, CausalKernel::from_exp_sum(grid, {{c, cx(1.0, 0.0)}}));
    Certification cert = certify_right_invertible(g, grid);
    CHECK(!cert.route_a);
    CHECK(!cert.route_b);
    CHECK(cert.lambda_min < 1e-6);
  }
}

TEST_CASE("compute_y: zero kernel and the worked-family closed form") {
  SUBCASE("g = 0 gives y = 0") {
    TimeGrid grid(0.05, 201);
    Mat d(1, 2);
    d << 1.0, 0.0;
    ComputedY y = compute_y(WienerPlusFunction::constant_only(d, grid), grid);
    for (int i = 0; i < grid.n; ++i) CHECK(y.y.sample(i).norm() == 0.0);
    CHECK(y.solver_residual == 0.0);
  }
  SUBCASE("worked family at h=0.01, T=30 within 1e-3 sup norm") {
    TimeGrid grid(0.01, 3001);
    WorkedInstance w = worked_family(1.0, 1.0, grid);
    ComputedY y = compute_y(w.g, grid);
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i)
      worst = std::max(worst, (y.y.sample(i) - w.y.sample(i)).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-3);
    CHECK(y.solver_residual < 1e-9);
  }
  SUBCASE("general (b, c) member reproduces its closed form") {
    TimeGrid grid(0.01, 2001);
    WorkedInstance w = worked_family(1.7, -0.8, grid);
    ComputedY y = compute_y(w.g, grid);
    double worst = 0.0;
    for (int i = 0; i < grid.n; ++i)
      worst = std::max(worst, (y.y.sample(i) - w.y.sample(i)).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-3);
  }
}

TEST_CASE("assemble: trivial kernel and worked-family spot values") {
  SUBCASE("y = 0") {
    TimeGrid grid(0.05, 201);
    Mat d(1, 2);
    d << 1.0, 0.0;
    WienerPlusFunction g = WienerPlusFunction::constant_only(d, grid);
    BezoutSolution sol = assemble(g, CausalKernel::zero(2, 2, grid));
    CHECK((eval_wiener(sol.Y, cx(0.0, 3.0)) - Mat::Identity(2, 2)).norm() == 0.0);
    CHECK((sol.xi.at_infinity() - sol.pointers.d_plus).norm() == 0.0);
    CHECK((sol.theta.at_infinity() - sol.pointers.e).norm() == 0.0);
  }
  SUBCASE("worked family: Y(0), Theta(0)") {
    TimeGrid grid(0.01, 3001);
    WorkedInstance w = worked_family(1.0, 1.0, grid);
    BezoutSolution sol = assemble(w.g, compute_y(w.g, grid).y);
    Mat y0 = eval_wiener(sol.Y, cx(0.0, 0.0));
    Mat y0_expected(2, 2);
    double r = std::sqrt(0.5);
    y0_expected << 1.0, -r, 0.0, r;
    CHECK((y0 - y0_expected).cwiseAbs().maxCoeff() < 1e-3);
    Mat th0 = eval_wiener(sol.theta, cx(0.0, 0.0));
    CHECK(std::abs(th0(0, 0) - cx(-r, 0.0)) < 1e-3);
    CHECK(std::abs(th0(1, 0) - cx(r, 0.0)) < 1e-3);
  }
}

TEST_CASE("eval_Y_inverse: identity case, worked family, infinity") {
  TimeGrid grid(0.01, 3001);
  WorkedInstance w = worked_family(1.0, 1.0, grid);
  BezoutSolution sol = assemble(w.g, compute_y(w.g, grid).y);
  SUBCASE("y = 0 gives the identity at every omega") {
    Mat d(1, 2);
    d << 1.0, 0.0;
    TimeGrid small(0.05, 201);
    BezoutSolution trivial =
        assemble(WienerPlusFunction::constant_only(d, small), CausalKernel::zero(2, 2, small));
    CHECK((eval_Y_inverse(trivial, 2.5) - Mat::Identity(2, 2)).norm() < 1e-14);
  }
  SUBCASE("worked family at omega = 0") {
    Mat inv0 = eval_Y_inverse(sol, 0.0);
    Mat expected(2, 2);
    expected << 1.0, 1.0, 0.0, std::sqrt(2.0);
    CHECK((inv0 - expected).cwiseAbs().maxCoeff() < 1e-3);
  }
  SUBCASE("at infinity Y^{-1} = I") {
    CHECK((eval_Y_inverse_at(sol, infinity_point()) - Mat::Identity(2, 2)).norm() == 0.0);
  }
}

TEST_CASE("parametrize: zero, strictly proper, constant parameters") {
  TimeGrid grid(0.01, 3001);
  WorkedInstance w = worked_family(1.0, 1.0, grid);
  BezoutSolution sol = assemble(w.g, compute_y(w.g, grid).y);

  SUBCASE("Z = 0 returns Xi") {
    SolutionParameter z = make_parameter(WienerPlusFunction::constant_only(Mat::Zero(1, 1), grid));
    WienerPlusFunction x = parametrize(sol, z);
    CHECK((x.at_infinity() - sol.xi.at_infinity()).norm() == 0.0);
    for (int i = 0; i < grid.n; ++i)
      CHECK((x.kernel().sample(i) - sol.xi.kernel().sample(i)).norm() == 0.0);
  }
  SUBCASE("Z(s) = 1/(s+1): closed-form product and Bezout residual") {
    Mat one(1, 1);
    one << 1.0;
    SolutionParameter z =
        make_parameter(WienerPlusFunction(Mat::Zero(1, 1),
                                          CausalKernel::from_exp_sum(grid, {{one, cx(1.0, 0.0)}})));
    CHECK(z.strictly_proper);
    WienerPlusFunction x = parametrize(sol, z);
    // X(s) = [1 - 1/((s+1)(s+sqrt2)); 1/(s+sqrt2)]
    cx s(0.0, 0.7);
    cx a(std::sqrt(2.0), 0.0);
    Mat xv = eval_wiener(x, s);
    CHECK(std::abs(xv(0, 0) - (1.0 - 1.0 / ((s + 1.0) * (s + a)))) < 1e-3);
    CHECK(std::abs(xv(1, 0) - 1.0 / (s + a)) < 1e-3);
    Mat g0v = eval_wiener(sol.g, cx(0.0, 0.0));
    Mat x0 = eval_wiener(x, cx(0.0, 0.0));
    CHECK(std::abs((g0v * x0)(0, 0) - 1.0) < 1e-3);
  }
  SUBCASE("constant Z = 1: X at infinity is D+ + E") {
    Mat one(1, 1);
    one << 1.0;
    SolutionParameter z = make_parameter(WienerPlusFunction::constant_only(one, grid));
    CHECK(!z.strictly_proper);
    WienerPlusFunction x = parametrize(sol, z);
    Mat expected = sol.pointers.d_plus + sol.pointers.e;
    CHECK((x.at_infinity() - expected).norm() < 1e-14);
    Mat gx = sol.g.at_infinity() * x.at_infinity();
    CHECK(std::abs(gx(0, 0) - 1.0) < 1e-14);
  }
  SUBCASE("dimension mismatch is rejected") {
    SolutionParameter z = make_parameter(WienerPlusFunction::constant_only(Mat::Zero(2, 1), grid));
    CHECK_THROWS_AS(parametrize(sol, z), std::invalid_argument);
  }
}

TEST_CASE("recover_parameter: round trips and trivial cases") {
  TimeGrid grid(0.01, 3001);
  FrequencyGrid freq = FrequencyGrid::symmetric(50.0, 2001);
  WorkedInstance w = worked_family(1.0, 1.0, grid);
  BezoutSolution sol = assemble(w.g, compute_y(w.g, grid).y);

  SUBCASE("X = Xi recovers Z = 0") {
    SolutionParameter z = recover_parameter(sol, sol.xi, freq);
    CHECK(z.strictly_proper);
    double worst = 0.0;
    for (double omega : {0.0, 3.0, 17.0})
      worst = std::max(worst, eval_wiener(z.z, cx(0.0, omega)).norm());
    CHECK(worst < 1e-6);
  }
  SUBCASE("Z(s) = 1/(s+1) round trips on the frequency grid") {
    Mat one(1, 1);
    one << 1.0;
    SolutionParameter z =
        make_parameter(WienerPlusFunction(Mat::Zero(1, 1),
                                          CausalKernel::from_exp_sum(grid, {{one, cx(1.0, 0.0)}})));
    WienerPlusFunction x = parametrize(sol, z);
    SolutionParameter rec = recover_parameter(sol, x, freq);
    double worst = 0.0;
    for (double omega : freq.omegas) {
      cx s(0.0, omega);
      worst = std::max(worst, std::abs(eval_wiener(rec.z, s)(0, 0) - 1.0 / (s + 1.0)));
    }
    CHECK(worst < 1e-3);
    // and the round trip reproduces X
    WienerPlusFunction x2 = parametrize(sol, rec);
    double xworst = 0.0;
    for (double omega : {0.0, 1.0, 8.0, 30.0})
      xworst = std::max(xworst, (eval_wiener(x2, cx(0.0, omega)) - eval_wiener(x, cx(0.0, omega))).norm());
    CHECK(xworst < 2e-3);
  }
  SUBCASE("constant X = [1; 0] equals Xi, so Z = 0") {
    Mat xconst(2, 1);
    xconst << 1.0, 0.0;
    WienerPlusFunction x = WienerPlusFunction::constant_only(xconst, grid);
    SolutionParameter z = recover_parameter(sol, x, freq);
    CHECK(eval_wiener(z.z, cx(0.0, 1.0)).norm() < 2e-3);
  }
  SUBCASE("a non-solution is rejected") {
    WienerPlusFunction bad = WienerPlusFunction::constant_only(Mat::Zero(2, 1), grid);
    CHECK_THROWS_AS(recover_parameter(sol, bad, freq), std::invalid_argument);
  }
}

TEST_CASE("square case p = m: unique solution, empty parameter") {
  TimeGrid grid(0.02, 751);
  Mat d = Mat::Identity(2, 2);
  Mat c(2, 2);
  c << 0.3, 0.0, 0.1, 0.2;
  WienerPlusFunction g(d, CausalKernel::from_exp_sum(grid, {{c, cx(1.0, 0.0)}}));
  BezoutSolution sol = solve_bezout(g, grid);
  CHECK(sol.theta.cols() == 0);
  SolutionParameter empty = make_parameter(WienerPlusFunction::constant_only(Mat::Zero(0, 2), grid));
  WienerPlusFunction x = parametrize(sol, empty);
  CHECK((x.at_infinity() - sol.xi.at_infinity()).norm() == 0.0);
  SolutionParameter wrong = make_parameter(WienerPlusFunction::constant_only(Mat::Zero(1, 2), grid));
  CHECK_THROWS_AS(parametrize(sol, wrong), std::invalid_argument);
}

TEST_CASE("solve_bezout refuses non-certifiable data") {
  TimeGrid grid(0.02, 501);
  Rng rng(61);
  WienerPlusFunction g = test::random_uncertifiable(2, 3, grid, rng);
  CHECK_THROWS_AS(solve_bezout(g, grid), NotRightInvertible);
}
