#include "wbz/solver.hpp"

#include <sstream>

#include "wbz/freqint.hpp"

namespace wbz {

Pointers right_pointers(const Mat& d) {
  const int m = static_cast<int>(d.rows());
  const int p = static_cast<int>(d.cols());
  if (m == 0 || p == 0 || m > p) throw std::invalid_argument("right_pointers: need 1 <= m <= p");
  Eigen::JacobiSVD<Mat> svd(d);
  const auto& sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(m - 1) <= 1e-10 * sv(0))
    throw SurjectivityFailure("right_pointers: D = G(infinity) is not surjective (rank-deficient)");

  Pointers out;
  Mat dd = d * d.adjoint();
  out.d_plus = d.adjoint() * dd.inverse();

  // Orthonormal basis of ker D from projections of the canonical basis,
  // highest index first, each column phase-fixed on its first nonzero entry.
  Mat proj = Mat::Identity(p, p) - out.d_plus * d;
  out.e = Mat(p, p - m);
  int found = 0;
  for (int j = p - 1; j >= 0 && found < p - m; --j) {
    Vec v = proj.col(j);
    for (int k = 0; k < found; ++k) v -= out.e.col(k).dot(v) * out.e.col(k);
    double nrm = v.norm();
    if (nrm <= 1e-8) continue;
    v /= nrm;
    for (int k = 0; k < found; ++k) v -= out.e.col(k).dot(v) * out.e.col(k);
    v.normalize();
    out.e.col(found++) = v;
  }
  if (found != p - m) throw std::runtime_error("right_pointers: null-space basis construction failed");
  for (int j = 0; j < p - m; ++j) {
    for (int i = 0; i < p; ++i) {
      cx v = out.e(i, j);
      if (std::abs(v) > 1e-12) {
        out.e.col(j) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return out;
}

namespace {

// I - H^* T_R^{-1} H has bottom eigenvalue 1 - lambda_max(H^* T_R^{-1} H).
double schur_complement_min_eigenvalue(const DiscretizedOperator& tr,
                                       std::shared_ptr<const SpdFactor> factor,
                                       const DiscretizedOperator& hg, const SolveConfig& cfg) {
  auto h = std::make_shared<DiscretizedOperator>(hg);
  LinOp k;
  k.rows = k.cols = hg.cols();
  if (factor) {
    k.apply = [h, factor](const Vec& v) { return h->apply_adjoint(factor->solve(h->apply(v))); };
  } else {
    auto trl = std::make_shared<LinOp>(as_linop(tr));
    auto spd = cfg.spd;
    k.apply = [h, trl, spd](const Vec& v) {
      return h->apply_adjoint(spd_solve(*trl, h->apply(v), spd));
    };
  }
  k.apply_adjoint = k.apply;
  return 1.0 - max_eigenvalue(k);
}

}  // namespace

Certification certify_right_invertible(const WienerPlusFunction& g, const TimeGrid& grid,
                                       const SolveConfig& cfg) {
  Certification cert;
  DiscretizedOperator tg = build_wiener_hopf(g, grid);
  LinOp normal = normal_linop(tg);
  std::tie(cert.lambda_min, cert.lambda_max) = hermitian_extremes(normal);
  cert.route_a = cert.lambda_min > cfg.positivity_threshold * std::max(cert.lambda_max, 1e-300);

  DiscretizedOperator tr = build_TR(g, grid);
  std::shared_ptr<SpdFactor> tr_factor;
  if (tr.dense_feasible()) {
    Mat herm = 0.5 * (tr.dense() + tr.dense().adjoint());
    tr_factor = std::make_shared<SpdFactor>(herm);
    LinOp trl = as_linop(herm);
    cert.lambda_max_tr = max_eigenvalue(trl);
    cert.lambda_min_tr = tr_factor->factorized() ? min_eigenvalue_with_factor(herm, *tr_factor)
                                                 : min_eigenvalue(trl);
    if (!tr_factor->factorized()) tr_factor.reset();
  } else {
    LinOp trl = as_linop(tr);
    std::tie(cert.lambda_min_tr, cert.lambda_max_tr) = hermitian_extremes(trl);
  }
  bool tr_ok = cert.lambda_min_tr > cfg.positivity_threshold * std::max(cert.lambda_max_tr, 1e-300);
  if (tr_ok) {
    DiscretizedOperator hg = build_hankel(g.kernel(), grid);
    cert.lambda_min_schur = schur_complement_min_eigenvalue(tr, tr_factor, hg, cfg);
    cert.route_b = tr_ok && cert.lambda_min_schur > cfg.positivity_threshold;
  } else {
    cert.lambda_min_schur = 0.0;
    cert.route_b = false;
  }

  if (cert.route_a != cert.route_b) {
    std::ostringstream msg;
    msg << "certify: routes disagree; spec(T_G T_G^*) edge [" << cert.lambda_min << ", "
        << cert.lambda_max << "], spec(T_R) edge [" << cert.lambda_min_tr << ", " << cert.lambda_max_tr
        << "], min eig(I - H^* T_R^{-1} H) = " << cert.lambda_min_schur;
    throw RouteDisagreement(msg.str());
  }
  return cert;
}

ComputedY compute_y(const WienerPlusFunction& g, const TimeGrid& grid, const SolveConfig& cfg) {
  const int p = g.cols();
  DiscretizedOperator tg = build_wiener_hopf(g, grid);
  CausalKernel kernel = g.kernel().resampled(grid);
  NormalSolver solver(tg, cfg.spd);

  std::vector<Mat> y_samples(grid.n, Mat::Zero(p, p));
  double worst = 0.0;
  for (int j = 0; j < p; ++j) {
    Vec b = pack_weighted_column(kernel, j, grid);
    SolveStats stats;
    Vec f = solver.solve_refined(b, &stats);
    worst = std::max(worst, stats.residual);
    Vec yj = apply_rowexact(solver.op_adjoint(), f);
    unpack_weighted_column(yj, p, grid, j, y_samples);
  }
  ComputedY out{CausalKernel::from_samples(grid, std::move(y_samples)), worst};
  return out;
}

BezoutSolution assemble(const WienerPlusFunction& g, const CausalKernel& y,
                        const SolverDiagnostics& diag) {
  const int p = g.cols();
  if (y.rows() != p || y.cols() != p) throw std::invalid_argument("assemble: y must be p x p");
  Pointers ptr = right_pointers(g.at_infinity());
  CausalKernel neg_y = y.scaled(cx(-1.0, 0.0));
  WienerPlusFunction yfun(Mat::Identity(p, p), neg_y);
  WienerPlusFunction xi(ptr.d_plus, neg_y.right_multiplied(ptr.d_plus));
  WienerPlusFunction theta(ptr.e, neg_y.right_multiplied(ptr.e));
  return BezoutSolution{g, std::move(ptr), y, std::move(yfun), std::move(xi), std::move(theta), diag};
}

BezoutSolution solve_bezout(const WienerPlusFunction& g, const TimeGrid& grid, const SolveConfig& cfg) {
  Certification cert = certify_right_invertible(g, grid, cfg);
  if (!cert.certified())
    throw NotRightInvertible("solve_bezout: T_G is not right invertible on this discretization");
  ComputedY y = compute_y(g, grid, cfg);
  SolverDiagnostics diag{cert.lambda_min, cert.route_a, cert.route_b, y.solver_residual};
  WienerPlusFunction gg(g.at_infinity(), g.kernel().resampled(grid));
  return assemble(gg, y.y, diag);
}

Mat eval_Y(const BezoutSolution& sol, cx s) { return eval_wiener(sol.Y, s); }

Mat eval_Y_inverse_at(const BezoutSolution& sol, cx s) {
  Mat y = eval_wiener(sol.Y, s);
  Eigen::JacobiSVD<Mat> svd(y);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 0.0) || sv(0) / sv(sv.size() - 1) > 1e12)
    throw std::runtime_error("eval_Y_inverse: Y(s) is numerically singular at the requested point");
  return y.inverse();
}

Mat eval_Y_inverse(const BezoutSolution& sol, double omega) {
  return eval_Y_inverse_at(sol, cx(0.0, omega));
}

SolutionParameter make_parameter(WienerPlusFunction z) {
  SolutionParameter out{std::move(z), false};
  out.strictly_proper = out.z.at_infinity().norm() <= 1e-12;
  return out;
}

WienerPlusFunction parametrize(const BezoutSolution& sol, const SolutionParameter& z) {
  const int m = sol.m();
  const int p = sol.p();
  if (z.z.rows() != p - m || z.z.cols() != m)
    throw std::invalid_argument("parametrize: parameter must be (p-m) x m");
  if (p == m) return sol.xi;  // unique solution, parameter is empty
  return add(sol.xi, multiply(sol.theta, z.z));
}

SolutionParameter recover_parameter(const BezoutSolution& sol, const WienerPlusFunction& x,
                                    const FrequencyGrid& freq) {
  const int m = sol.m();
  const int p = sol.p();
  if (x.rows() != p || x.cols() != m) throw std::invalid_argument("recover_parameter: X must be p x m");

  // X must solve the Bezout equation before a parameter can be read off.
  double residual = 0.0;
  for (double omega : freq.omegas) {
    cx s(0.0, omega);
    residual = std::max(residual,
                        spectral_norm(eval_wiener(sol.g, s) * eval_wiener(x, s) - Mat::Identity(m, m)));
  }
  const double tol = std::max(1e-3, 10.0 * sol.diagnostics.solver_residual);
  if (residual > tol)
    throw std::invalid_argument("recover_parameter: X does not solve G X = I on the frequency grid");

  Mat z_inf = sol.pointers.e.adjoint() * x.at_infinity();
  auto zhat = [&](double omega) -> Mat {
    cx s(0.0, omega);
    Mat h = eval_wiener_filon(x, s) - eval_wiener_filon(sol.xi, s);
    Mat yv = eval_wiener_filon(sol.Y, s);
    return sol.pointers.e.adjoint() * yv.inverse() * h - z_inf;
  };
  const TimeGrid& grid = sol.grid();
  auto params = InverseTransformParams::for_horizon(grid.horizon());
  std::vector<Mat> samples = inverse_transform(zhat, p - m, m, 0.0, grid.h, grid.n, params);
  if (!samples.empty()) samples[0] *= 2.0;  // one-sided limit at the jump t = 0
  SolutionParameter out{WienerPlusFunction(z_inf, CausalKernel::from_samples(grid, std::move(samples))),
                        false};
  out.strictly_proper = z_inf.norm() <= 1e-12;
  return out;
}

}  // namespace wbz
