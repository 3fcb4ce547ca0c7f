#include "wbz/oracle.hpp"

namespace wbz {

WorkedInstance worked_family(double b, double c, const TimeGrid& grid) {
  if (!(b > 0.0) || c == 0.0)
    throw std::invalid_argument("worked_family: need b > 0 and c != 0");
  WorkedInstance w;
  w.b = b;
  w.c = c;
  w.a = std::sqrt(b * b + c * c);
  const double a = w.a;

  Mat d(1, 2);
  d << 1.0, 0.0;
  Mat gcoef(1, 2);
  gcoef << 0.0, c;
  w.g = WienerPlusFunction(d, CausalKernel::from_exp_sum(grid, {{gcoef, cx(b, 0.0)}}));

  Mat ycoef(2, 2);
  ycoef << 0.0, c, 0.0, c * c / (a + b);
  w.y = CausalKernel::from_exp_sum(grid, {{ycoef, cx(a, 0.0)}});

  w.Y = WienerPlusFunction(Mat::Identity(2, 2),
                           CausalKernel::from_exp_sum(grid, {{-ycoef, cx(a, 0.0)}}));

  // Y^{-1}(s) = [[1, c/(s+b)], [0, (s+a)/(s+b)]]
  Mat yinv_coef(2, 2);
  yinv_coef << 0.0, c, 0.0, a - b;
  w.y_inverse = WienerPlusFunction(Mat::Identity(2, 2),
                                   CausalKernel::from_exp_sum(grid, {{yinv_coef, cx(b, 0.0)}}));

  w.pointers = right_pointers(d);

  Mat dplus(2, 1);
  dplus << 1.0, 0.0;
  w.xi = WienerPlusFunction(dplus, CausalKernel::zero(2, 1, grid));

  Mat e(2, 1);
  e << 0.0, 1.0;
  Mat tcoef(2, 1);
  tcoef << -c, -c * c / (a + b);
  w.theta = WienerPlusFunction(e, CausalKernel::from_exp_sum(grid, {{tcoef, cx(a, 0.0)}}));
  return w;
}

DualGridReport dual_grid_compare(const WienerPlusFunction& g, const TimeGrid& grid,
                                 const SolveConfig& cfg, const CausalKernel* exact) {
  DualGridReport out;
  const TimeGrid fine = grid.refined();
  CausalKernel y_h = compute_y(g, grid, cfg).y;
  CausalKernel y_h2 = compute_y(g, fine, cfg).y;

  double diff = 0.0;
  for (int i = 0; i < grid.n; ++i)
    diff = std::max(diff, (y_h.sample(i) - y_h2.sample(2 * i)).norm());
  out.successive_diff = diff;

  if (exact != nullptr) {
    CausalKernel ec = exact->resampled(grid);
    CausalKernel ef = exact->resampled(fine);
    for (int i = 0; i < grid.n; ++i)
      out.coarse_error = std::max(out.coarse_error, (y_h.sample(i) - ec.sample(i)).norm());
    for (int i = 0; i < fine.n; ++i)
      out.fine_error = std::max(out.fine_error, (y_h2.sample(i) - ef.sample(i)).norm());
    out.order = std::log2(out.coarse_error / std::max(out.fine_error, 1e-300));
  } else {
    const TimeGrid finer = fine.refined();
    CausalKernel y_h4 = compute_y(g, finer, cfg).y;
    double diff2 = 0.0;
    for (int i = 0; i < fine.n; ++i)
      diff2 = std::max(diff2, (y_h2.sample(i) - y_h4.sample(2 * i)).norm());
    out.order = std::log2(out.successive_diff / std::max(diff2, 1e-300));
  }
  return out;
}

CausalKernel schur_path_y(const WienerPlusFunction& g, const TimeGrid& grid, const SolveConfig& cfg) {
  const int p = g.cols();
  CausalKernel kernel = g.kernel().grid() == grid ? g.kernel() : g.kernel().resampled(grid);
  DiscretizedOperator tg = build_wiener_hopf(g, grid);
  DiscretizedOperator hg = build_hankel(kernel, grid);

  // finite-section T_R as the exact sum, so the inversion formula is exact
  const Mat& tgd = tg.dense();
  const Mat& hgd = hg.dense();
  Mat b = tgd * tgd.adjoint() + hgd * hgd.adjoint();
  b = 0.5 * (b + b.adjoint()).eval();
  auto factor = std::make_shared<SpdFactor>(b);
  if (!factor->positive_definite())
    throw std::runtime_error("schur_path_y: T_R finite section is not positive definite");

  auto h = std::make_shared<DiscretizedOperator>(hg);
  LinOp contraction;
  contraction.rows = contraction.cols = hg.cols();
  contraction.apply = [h, factor](const Vec& v) -> Vec {
    return v - h->apply_adjoint(factor->solve(h->apply(v)));
  };
  contraction.apply_adjoint = contraction.apply;

  // the inversion formula, applied to one vector
  auto formula_inverse = [&](const Vec& rhs) -> Vec {
    Vec x1 = factor->solve(rhs);
    Vec u = spd_solve(contraction, h->apply_adjoint(x1), cfg.spd);
    return x1 + factor->solve(h->apply(u));
  };

  DiscretizedOperator adj = tg.adjoint();
  std::vector<Mat> y_samples(grid.n, Mat::Zero(p, p));
  for (int j = 0; j < p; ++j) {
    Vec rhs = pack_weighted_column(kernel, j, grid);
    if (rhs.norm() == 0.0) continue;
    // same refined target system as the direct route, with the formula as
    // the inner inverse, so the two paths share their fixed point
    Vec f = formula_inverse(rhs);
    for (int pass = 0; pass < kNormalRefinementPasses; ++pass) {
      Vec r = rhs - apply_rowexact(tg, apply_rowexact(adj, f));
      f += formula_inverse(r);
    }
    Vec yj = apply_rowexact(adj, f);
    unpack_weighted_column(yj, p, grid, j, y_samples);
  }
  return CausalKernel::from_samples(grid, std::move(y_samples));
}

}  // namespace wbz
