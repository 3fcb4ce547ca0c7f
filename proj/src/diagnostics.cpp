#include "wbz/diagnostics.hpp"

#include <sstream>

#include "wbz/freqint.hpp"
#include "wbz/oracle.hpp"

namespace wbz {

double default_tolerance(double solver_residual) { return std::max(1e-3, 10.0 * solver_residual); }

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

ResidualEntry make_entry(std::string id, double residual, double tol, std::string note = {}) {
  ResidualEntry e;
  e.id = std::move(id);
  e.residual = residual;
  e.tolerance = tol;
  e.pass = residual <= tol;
  e.note = std::move(note);
  return e;
}

}  // namespace

ResidualEntry residual_bezout(const WienerPlusFunction& g, const WienerPlusFunction& x,
                              const FrequencyGrid& freq, double tol) {
  if (g.cols() != x.rows() || g.rows() != x.cols())
    throw std::invalid_argument("residual_bezout: dimension mismatch");
  const Mat id = Mat::Identity(g.rows(), g.rows());
  double worst = 0.0;
  for (double omega : freq.omegas) {
    cx s(0.0, omega);
    worst = std::max(worst, spectral_norm(eval_wiener(g, s) * eval_wiener(x, s) - id));
  }
  return make_entry("bezout", worst, tol);
}

ResidualEntry residual_gy_equals_d(const WienerPlusFunction& g, const WienerPlusFunction& y,
                                   const FrequencyGrid& freq, double tol) {
  const Mat& d = g.at_infinity();
  double worst = 0.0;
  for (double omega : freq.omegas) {
    cx s(0.0, omega);
    worst = std::max(worst, spectral_norm(eval_wiener(g, s) * eval_wiener(y, s) - d));
  }
  return make_entry("gy_equals_d", worst, tol);
}

ResidualEntry residual_inner(const WienerPlusFunction& theta, const FrequencyGrid& freq, double tol) {
  const int q = theta.cols();
  const Mat id = Mat::Identity(q, q);
  double worst = 0.0;
  for (double omega : freq.omegas) {
    Mat th = eval_wiener(theta, cx(0.0, omega));
    worst = std::max(worst, spectral_norm(th.adjoint() * th - id));
  }
  // exact at infinity: E^* E = I
  Mat e = theta.at_infinity();
  double at_inf = spectral_norm(e.adjoint() * e - id);
  std::string note = q == 0 ? "empty inner function (square case)" : "at infinity: " + fmt(at_inf);
  ResidualEntry entry = make_entry("inner", worst, tol, note);
  if (at_inf > 1e-10) entry.pass = false;
  return entry;
}

WindingResult winding_det_Y(const WienerPlusFunction& y, const FrequencyGrid& freq) {
  WindingResult out;
  std::vector<cx> dets(freq.size());
  double min_abs = std::numeric_limits<double>::infinity();
  for (int i = 0; i < freq.size(); ++i) {
    Mat v = eval_wiener(y, cx(0.0, freq.omegas[i]));
    dets[i] = v.determinant();
    min_abs = std::min(min_abs, std::abs(dets[i]));
  }
  out.min_abs_det = min_abs;
  if (!(min_abs > 0.0)) {
    out.reliable = false;
    return out;
  }
  // closed curve: 1 at -i inf, along the axis, back to 1 at +i inf
  double total = std::arg(dets.front());
  double max_step = std::abs(total);
  for (int i = 0; i + 1 < freq.size(); ++i) {
    double step = std::arg(dets[i + 1] / dets[i]);
    max_step = std::max(max_step, std::abs(step));
    total += step;
  }
  double closing = std::arg(1.0 / dets.back());
  max_step = std::max(max_step, std::abs(closing));
  total += closing;
  out.max_phase_step = max_step;
  double raw = total / (2.0 * M_PI);
  out.winding = static_cast<int>(std::lround(raw));
  out.reliable = max_step < M_PI / 2.0 && std::abs(raw - out.winding) < 0.1;
  return out;
}

ResidualEntry winding_entry(const WienerPlusFunction& y, const FrequencyGrid& freq, double min_det_tol) {
  WindingResult w = winding_det_Y(y, freq);
  ResidualEntry e;
  e.id = "winding";
  e.residual = std::abs(static_cast<double>(w.winding));
  e.tolerance = 0.5;
  e.pass = w.reliable && w.winding == 0 && w.min_abs_det > min_det_tol;
  std::ostringstream note;
  note << "winding=" << w.winding << " min|det|=" << fmt(w.min_abs_det)
       << " max_phase_step=" << fmt(w.max_phase_step) << (w.reliable ? "" : " UNRELIABLE");
  e.note = note.str();
  return e;
}

ResidualEntry residual_tolokonnikov(const BezoutSolution& sol, const FrequencyGrid& freq, double tol) {
  const int p = sol.p();
  const Mat id = Mat::Identity(p, p);
  Mat de(p, p);
  de.leftCols(sol.m()) = sol.pointers.d_plus;
  de.rightCols(p - sol.m()) = sol.pointers.e;
  double worst = 0.0;
  double algebraic = 0.0;
  for (double omega : freq.omegas) {
    cx s(0.0, omega);
    Mat yv = eval_wiener(sol.Y, s);
    Mat yde = yv * de;
    // Y(s) [D+ E] and [Xi(s) Theta(s)] agree up to rounding by construction.
    Mat xt(p, p);
    xt.leftCols(sol.m()) = eval_wiener(sol.xi, s);
    xt.rightCols(p - sol.m()) = eval_wiener(sol.theta, s);
    algebraic = std::max(algebraic, (yde - xt).norm());
    Mat stacked(p, p);
    stacked.topRows(sol.m()) = eval_wiener(sol.g, s);
    stacked.bottomRows(p - sol.m()) = sol.pointers.e.adjoint() * eval_Y_inverse_at(sol, s);
    worst = std::max(worst, spectral_norm(stacked * yde - id));
  }
  std::string note = "Y[D+ E] vs [Xi Theta]: " + fmt(algebraic);
  ResidualEntry entry = make_entry("tolokonnikov", worst, tol, note);
  if (algebraic > 1e-10) entry.pass = false;
  return entry;
}

AnticausalityResult anticausality_mass(const std::function<Mat(double)>& axis_fn, int rows, int cols,
                                       const TimeGrid& grid) {
  AnticausalityResult out;
  if (rows == 0 || cols == 0) return out;
  const int n = grid.n;
  const int count = 2 * n - 1;
  auto params = InverseTransformParams::for_horizon(grid.horizon());
  std::vector<Mat> m = inverse_transform(axis_fn, rows, cols, -grid.horizon(), grid.h, count, params);
  auto w = [&](int k) { return (k == 0 || k == count - 1) ? 0.5 * grid.h : grid.h; };
  double total = 0.0;
  for (int k = 0; k < count; ++k) total += w(k) * m[k].squaredNorm();
  out.total_mass = total;
  if (total < 1e-14) {
    out.ratio = 0.0;
    return out;
  }
  // mass past t = 2h, trapezoid on [2h, T]
  double pos = 0.0;
  for (int k = n + 1; k < count; ++k) {
    double ww = (k == n + 1 || k == count - 1) ? 0.5 * grid.h : grid.h;
    pos += ww * m[k].squaredNorm();
  }
  out.ratio = pos / total;
  return out;
}

AnticausalityResult anticausality_theta_star_xi(const BezoutSolution& sol) {
  auto fn = [&sol](double omega) -> Mat {
    cx s(0.0, omega);
    return eval_wiener_filon(sol.theta, s).adjoint() * eval_wiener_filon(sol.xi, s);
  };
  return anticausality_mass(fn, sol.p() - sol.m(), sol.m(), sol.grid());
}

ResidualEntry anticausality_entry(const BezoutSolution& sol, double tol) {
  AnticausalityResult r = anticausality_theta_star_xi(sol);
  std::string note = "total L2 mass = " + fmt(r.total_mass);
  if (r.total_mass < 1e-14) note += " (trivial)";
  return make_entry("anticausality", r.ratio, tol, note);
}

PythagorasResult pythagoras_minimality(const BezoutSolution& sol, const SolutionParameter& z,
                                       const Vec& u, const FrequencyGrid& freq) {
  if (z.z.at_infinity().norm() > 1e-10)
    throw std::invalid_argument("pythagoras_minimality: parameter must be strictly proper");
  if (u.size() != sol.m() || u.norm() == 0.0)
    throw std::invalid_argument("pythagoras_minimality: u must be a nonzero m-vector");
  WienerPlusFunction x = parametrize(sol, z);

  const int nf = freq.size();
  std::vector<double> f1(nf), f2(nf), f3(nf);
  std::vector<cx> fc(nf);
  const Vec xinf_u = x.at_infinity() * u;
  const Vec dplus_u = sol.pointers.d_plus * u;
  for (int i = 0; i < nf; ++i) {
    cx s(0.0, freq.omegas[i]);
    Vec xu = eval_wiener(x, s) * u - xinf_u;
    Vec xiu = eval_wiener(sol.xi, s) * u - dplus_u;
    Vec zu = sol.p() > sol.m() ? Vec(eval_wiener(z.z, s) * u) : Vec(Vec::Zero(0));
    Vec thzu = sol.p() > sol.m() ? Vec(eval_wiener(sol.theta, s) * zu) : Vec(Vec::Zero(sol.p()));
    f1[i] = xu.squaredNorm();
    f2[i] = xiu.squaredNorm();
    f3[i] = zu.squaredNorm();
    fc[i] = xiu.dot(thzu);  // conjugates the first factor
  }
  PythagorasResult out;
  out.p1 = freq_integral(freq, f1);
  out.p2 = freq_integral(freq, f2);
  out.p3 = freq_integral(freq, f3);
  out.cross = std::abs(freq_integral(freq, fc));
  const double scale = std::max(out.p1, 1e-14);
  out.rel_error = std::abs(out.p1 - out.p2 - out.p3) / scale;
  out.cross_rel = out.cross / scale;
  return out;
}

ResidualEntry kernel_identity_entry(const BezoutSolution& sol, double tol, const SolveConfig& cfg) {
  if (sol.p() == sol.m())
    return make_entry("kernel_identity", 0.0, tol, "square case: ker T_G = {0}");
  DiscretizedOperator tg = build_wiener_hopf(sol.g, sol.grid());
  DiscretizedOperator tth = build_wiener_hopf(sol.theta, sol.grid());
  LinOp tg_l = as_linop(tg);
  LinOp tth_l = as_linop(tth);
  double tg_norm = operator_norm(tg_l);
  double prod_norm = operator_norm(compose(tg_l, tth_l));
  double worst = prod_norm / std::max(tg_norm, 1e-300);

  // reverse inclusion: random elements of ker T_G project onto range T_Theta
  LinOp normal = normal_linop(tg);
  LinOp gram = compose(LinOp{tth_l.cols, tth_l.rows, tth_l.apply_adjoint, tth_l.apply, nullptr}, tth_l);
  Rng rng(kIterationSeed + 3);
  double spot = 0.0;
  for (int probe = 0; probe < 3; ++probe) {
    Vec v = rng.cgaussian_vector(tg.cols());
    Vec f = spd_solve(normal, tg.apply(v), cfg.spd);
    Vec vker = v - tg.apply_adjoint(f);
    double nk = vker.norm();
    if (nk < 1e-12) continue;
    Vec rhs = tth.apply_adjoint(vker);
    Vec uu = spd_solve(gram, rhs, cfg.spd);
    Vec w = tth.apply(uu);
    spot = std::max(spot, (vker - w).norm() / nk);
  }
  std::ostringstream note;
  note << "|T_G T_Theta|/|T_G|=" << fmt(worst) << " null-space projection residual=" << fmt(spot);
  return make_entry("kernel_identity", std::max(worst, spot), tol, note.str());
}

std::vector<ResidualEntry> appendix_operator_checks(const WienerPlusFunction& g, const TimeGrid& grid,
                                                    const SolveConfig& cfg) {
  std::vector<ResidualEntry> out;
  CausalKernel kernel = g.kernel().grid() == grid ? g.kernel() : g.kernel().resampled(grid);
  KernelNorms nn = norms(kernel);

  // (a) kappa bounds for the constant-free Wiener-Hopf part and the Hankel
  WienerPlusFunction w0(Mat::Zero(g.rows(), g.cols()), kernel);
  DiscretizedOperator w = build_wiener_hopf(w0, grid);
  DiscretizedOperator h = build_hankel(kernel, grid);
  double wn = operator_norm(as_linop(w));
  double hn = operator_norm(as_linop(h));
  double ratio = nn.kappa > 1e-300 ? std::max(wn, hn) / nn.kappa : 0.0;
  out.push_back(make_entry("kappa_bounds", ratio, 1.05,
                           "|W|=" + fmt(wn) + " |H|=" + fmt(hn) + " kappa=" + fmt(nn.kappa)));

  // (b) Hankel singular values collapse past the exponential-sum rank
  if (kernel.has_exp_sum()) {
    int rank = 0;
    for (const auto& term : kernel.exp_terms()) {
      Eigen::JacobiSVD<Mat> svd(term.coeff);
      for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-12 * svd.singularValues()(0)) ++rank;
    }
    auto sv = top_singular_values(as_linop(h), rank + 1);
    double s1 = sv.empty() ? 0.0 : sv.front();
    double tail = sv.size() > static_cast<size_t>(rank) ? sv[rank] : 0.0;
    double rel = s1 > 1e-300 ? tail / s1 : 0.0;
    out.push_back(make_entry("hankel_rank", rel, 1e-8,
                             "sigma_1=" + fmt(s1) + " sigma_{r+1}=" + fmt(tail) + " r=" + std::to_string(rank)));
  } else {
    out.push_back(make_entry("hankel_rank", 0.0, 1e-8, "sampled kernel: no exponential-sum rank"));
  }

  // (c) I - H^* T_R^{-1} H strictly positive, consistent with route B
  Certification cert = certify_right_invertible(g, grid, cfg);
  double lam = cert.lambda_min_schur;
  ResidualEntry e;
  e.id = "appendix_schur_positivity";
  e.residual = lam;
  e.tolerance = cfg.positivity_threshold;
  e.pass = cert.route_b == (lam > cfg.positivity_threshold);
  e.note = "min eig(I - H^* T_R^{-1} H) = " + fmt(lam) + (cert.route_b ? " route_b=true" : " route_b=false");
  out.push_back(e);
  return out;
}

WienerPlusFunction random_strictly_proper(int rows, int cols, const TimeGrid& grid, Rng& rng) {
  const int nterms = 1 + static_cast<int>(rng.uniform() * 2.0);
  std::vector<ExpTerm> terms;
  for (int k = 0; k < nterms; ++k) {
    Mat c = rng.cgaussian_matrix(rows, cols);
    if (c.norm() > 0) c /= c.norm();
    // pole stiffness chosen so that h = 0.01 grids resolve the convolution
    cx pole(rng.uniform(0.8, 1.8), rng.uniform(-0.8, 0.8));
    terms.push_back({c, pole});
  }
  return WienerPlusFunction(Mat::Zero(rows, cols), CausalKernel::from_exp_sum(grid, terms));
}

ResidualReport run_verification(const BezoutSolution& sol, const FrequencyGrid& freq,
                                const VerifyOptions& opts) {
  ResidualReport report;
  report.omega_max = freq.omega_max();
  report.freq_count = freq.size();
  report.grid_h = sol.grid().h;
  report.grid_horizon = sol.grid().horizon();
  const double tol = opts.tolerance > 0.0 ? opts.tolerance
                                          : default_tolerance(sol.diagnostics.solver_residual);

  report.entries.push_back(residual_bezout(sol.g, sol.xi, freq, tol));
  report.entries.push_back(residual_gy_equals_d(sol.g, sol.Y, freq, tol));
  report.entries.push_back(residual_inner(sol.theta, freq, tol));
  ResidualEntry wind = winding_entry(sol.Y, freq);
  if (wind.pass) {
    report.entries.push_back(residual_tolokonnikov(sol, freq, tol));
  } else {
    ResidualEntry e = make_entry("tolokonnikov", std::numeric_limits<double>::infinity(), tol,
                                 "skipped: winding check failed");
    e.pass = false;
    report.entries.push_back(e);
  }
  report.entries.push_back(wind);
  report.entries.push_back(kernel_identity_entry(sol, tol, opts.solve));
  report.entries.push_back(anticausality_entry(sol, tol));

  if (opts.full) {
    // pythagoras over random strictly proper parameters
    Rng rng(opts.seed);
    double worst = 0.0;
    if (sol.p() > sol.m()) {
      for (int draw = 0; draw < opts.pythagoras_draws; ++draw) {
        SolutionParameter z =
            make_parameter(random_strictly_proper(sol.p() - sol.m(), sol.m(), sol.grid(), rng));
        Vec u = rng.cgaussian_vector(sol.m());
        u /= u.norm();
        PythagorasResult r = pythagoras_minimality(sol, z, u, freq);
        worst = std::max(worst, std::max(r.rel_error, r.cross_rel));
      }
    }
    report.entries.push_back(make_entry("pythagoras", worst, tol,
                                        std::to_string(opts.pythagoras_draws) + " random parameters"));

    DecompositionResidual dec = decomposition_residual(sol.g, sol.grid());
    report.entries.push_back(make_entry("decomposition", dec.frobenius_rel, 1e-2,
                                        "spectral_rel=" + fmt(dec.spectral_rel)));

    auto appendix = appendix_operator_checks(sol.g, sol.grid(), opts.solve);
    for (auto& e : appendix)
      if (e.id != "appendix_schur_positivity") report.entries.push_back(e);

    // two algebraically identical routes to y
    CausalKernel ys = schur_path_y(sol.g, sol.grid(), opts.solve);
    double scale = 0.0, diff = 0.0;
    for (int i = 0; i < sol.grid().n; ++i) {
      scale = std::max(scale, sol.y.sample(i).norm());
      diff = std::max(diff, (ys.sample(i) - sol.y.sample(i)).norm());
    }
    double rel = scale > 1e-300 ? diff / scale : 0.0;
    report.entries.push_back(make_entry("schur_route", rel, 1e-6));
  }
  return report;
}

}  // namespace wbz
