#include "wbz/operator.hpp"

#include <cmath>

#include "wbz/rng.hpp"

namespace wbz {

namespace {

// Per-entry contiguous view of a block table, for the hot apply loops.
struct EntryTable {
  int block_rows = 0, block_cols = 0;
  std::vector<Vec> entries;  // entries[r * block_cols + c], indexed by table slot

  static EntryTable from(const std::vector<Mat>& table, int br, int bc) {
    EntryTable et;
    et.block_rows = br;
    et.block_cols = bc;
    et.entries.assign(static_cast<size_t>(br) * bc, Vec(table.size()));
    for (int r = 0; r < br; ++r)
      for (int c = 0; c < bc; ++c) {
        Vec& e = et.entries[static_cast<size_t>(r) * bc + c];
        for (size_t d = 0; d < table.size(); ++d) e(static_cast<Eigen::Index>(d)) = table[d](r, c);
      }
    return et;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// DiscretizedOperator

DiscretizedOperator DiscretizedOperator::wiener_hopf(Mat constant, std::vector<Mat> table,
                                                     const TimeGrid& grid, std::string provenance,
                                                     Mat zero_pos, Mat zero_neg) {
  DiscretizedOperator op;
  op.kind_ = OperatorKind::WienerHopf;
  op.block_rows_ = static_cast<int>(constant.rows());
  op.block_cols_ = static_cast<int>(constant.cols());
  op.grid_ = grid;
  op.constant_ = std::move(constant);
  op.table_ = std::move(table);
  op.provenance_ = std::move(provenance);
  if (static_cast<int>(op.table_.size()) != 2 * grid.n - 1)
    throw std::invalid_argument("DiscretizedOperator: Wiener-Hopf table must have 2N-1 lags");
  op.pos_zero_ = zero_pos.size() ? std::move(zero_pos) : Mat::Zero(op.block_rows_, op.block_cols_);
  op.neg_zero_ = zero_neg.size() ? std::move(zero_neg) : Mat::Zero(op.block_rows_, op.block_cols_);
  return op;
}

DiscretizedOperator DiscretizedOperator::hankel(std::vector<Mat> table, const TimeGrid& grid,
                                                std::string provenance) {
  if (table.empty()) throw std::invalid_argument("DiscretizedOperator: empty Hankel table");
  DiscretizedOperator op;
  op.kind_ = OperatorKind::Hankel;
  op.block_rows_ = static_cast<int>(table[0].rows());
  op.block_cols_ = static_cast<int>(table[0].cols());
  op.grid_ = grid;
  op.constant_ = Mat::Zero(op.block_rows_, op.block_cols_);
  op.table_ = std::move(table);
  op.provenance_ = std::move(provenance);
  if (static_cast<int>(op.table_.size()) != 2 * grid.n - 1)
    throw std::invalid_argument("DiscretizedOperator: Hankel table must have 2N-1 sums");
  return op;
}

DiscretizedOperator DiscretizedOperator::composite(Mat dense, int block_rows, int block_cols,
                                                   const TimeGrid& grid, std::string provenance) {
  DiscretizedOperator op;
  op.kind_ = OperatorKind::Composite;
  op.block_rows_ = block_rows;
  op.block_cols_ = block_cols;
  op.grid_ = grid;
  op.constant_ = Mat::Zero(block_rows, block_cols);
  op.provenance_ = std::move(provenance);
  if (dense.rows() != op.rows() || dense.cols() != op.cols())
    throw std::invalid_argument("DiscretizedOperator: composite matrix size mismatch");
  op.dense_ = std::make_shared<Mat>(std::move(dense));
  return op;
}

Vec DiscretizedOperator::apply(const Vec& v) const {
  if (v.size() != cols()) throw std::invalid_argument("DiscretizedOperator::apply: size mismatch");
  if (kind_ == OperatorKind::Composite) return (*dense_) * v;

  const int n = grid_.n;
  const int m = block_rows_, p = block_cols_;
  const auto sw = grid_.sqrt_weights();

  // unpack into per-component contiguous arrays, weighted
  std::vector<Vec> x(p, Vec(n));
  for (int c = 0; c < p; ++c)
    for (int i = 0; i < n; ++i) x[c](i) = sw[i] * v(static_cast<Eigen::Index>(i) * p + c);

  std::vector<Vec> y(m, Vec::Zero(n));
  const EntryTable et = EntryTable::from(table_, m, p);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < p; ++c) {
      const Vec& a = et.entries[static_cast<size_t>(r) * p + c];
      const Vec& xc = x[c];
      Vec& yr = y[r];
      if (kind_ == OperatorKind::WienerHopf) {
        // a is indexed by lag + (n-1)
        for (int i = 0; i < n; ++i) {
          cx acc(0.0, 0.0);
          const cx* ap = a.data() + (i + n - 1);
          const cx* xp = xc.data();
          for (int j = 0; j < n; ++j) acc += ap[-j] * xp[j];
          yr(i) += acc;
        }
      } else {
        // Hankel: a indexed by i + j
        for (int i = 0; i < n; ++i) {
          cx acc(0.0, 0.0);
          const cx* ap = a.data() + i;
          const cx* xp = xc.data();
          for (int j = 0; j < n; ++j) acc += ap[j] * xp[j];
          yr(i) += acc;
        }
      }
    }
  }

  Vec out(rows());
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < m; ++r) {
      cx val = sw[i] * y[r](i);
      for (int c = 0; c < p; ++c) val += constant_(r, c) * v(static_cast<Eigen::Index>(i) * p + c);
      out(static_cast<Eigen::Index>(i) * m + r) = val;
    }
  }
  return out;
}

Vec DiscretizedOperator::apply_adjoint(const Vec& v) const {
  if (v.size() != rows()) throw std::invalid_argument("DiscretizedOperator::apply_adjoint: size mismatch");
  if (kind_ == OperatorKind::Composite) return dense_->adjoint() * v;
  return adjoint().apply(v);
}

DiscretizedOperator DiscretizedOperator::adjoint() const {
  DiscretizedOperator op;
  op.kind_ = kind_;
  op.block_rows_ = block_cols_;
  op.block_cols_ = block_rows_;
  op.grid_ = grid_;
  op.constant_ = constant_.adjoint();
  op.provenance_ = "adj(" + provenance_ + ")";
  if (kind_ == OperatorKind::Composite) {
    op.dense_ = std::make_shared<Mat>(dense_->adjoint());
    return op;
  }
  op.table_.resize(table_.size());
  const size_t last = table_.size() - 1;
  if (kind_ == OperatorKind::WienerHopf) {
    // adjoint symbol kernel: k*(t) = k(-t)^*
    for (size_t d = 0; d < table_.size(); ++d) op.table_[d] = table_[last - d].adjoint();
    op.pos_zero_ = neg_zero_.adjoint();
    op.neg_zero_ = pos_zero_.adjoint();
  } else {
    for (size_t d = 0; d < table_.size(); ++d) op.table_[d] = table_[d].adjoint();
  }
  return op;
}

const Mat& DiscretizedOperator::dense() const {
  if (dense_) return *dense_;
  if (rows() * cols() > Eigen::Index(64) * 1024 * 1024)
    throw std::runtime_error("DiscretizedOperator::dense: matrix too large to materialize");
  const int n = grid_.n;
  const int m = block_rows_, p = block_cols_;
  const auto sw = grid_.sqrt_weights();
  auto dense = std::make_shared<Mat>(rows(), cols());
  Mat& a = *dense;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Mat& k = kind_ == OperatorKind::WienerHopf ? table_[(i - j) + n - 1] : table_[i + j];
      Mat block = sw[i] * sw[j] * k;
      if (kind_ == OperatorKind::WienerHopf && i == j) block += constant_;
      a.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(j) * p, m, p) = block;
    }
  }
  dense_ = dense;
  return *dense_;
}

std::shared_ptr<const Mat> DiscretizedOperator::dense_ptr() const {
  dense();
  return dense_;
}

// ---------------------------------------------------------------------------
// Builders

DiscretizedOperator build_wiener_hopf(const WienerPlusFunction& f, const TimeGrid& grid) {
  CausalKernel kernel = f.kernel().resampled(grid);
  const int n = grid.n;
  std::vector<Mat> table(2 * n - 1, Mat::Zero(f.rows(), f.cols()));
  for (int d = 1; d < n; ++d) table[(n - 1) + d] = kernel.sample(d);
  table[n - 1] = 0.5 * kernel.sample(0);  // jump average; kernel vanishes for t < 0
  return DiscretizedOperator::wiener_hopf(f.at_infinity(), std::move(table), grid, "T_F",
                                          kernel.sample(0), Mat::Zero(f.rows(), f.cols()));
}

DiscretizedOperator build_wiener_hopf(const Mat& constant, const FullLineKernel& kernel,
                                      std::string provenance) {
  const TimeGrid& grid = kernel.grid();
  const int n = grid.n;
  std::vector<Mat> table(2 * n - 1);
  for (int d = 1; d < n; ++d) {
    table[(n - 1) + d] = kernel.pos.sample(d);
    table[(n - 1) - d] = kernel.neg.sample(d);
  }
  table[n - 1] = 0.5 * (kernel.pos.sample(0) + kernel.neg.sample(0));
  return DiscretizedOperator::wiener_hopf(constant, std::move(table), grid, std::move(provenance),
                                          kernel.pos.sample(0), kernel.neg.sample(0));
}

DiscretizedOperator build_adjoint(const DiscretizedOperator& op) { return op.adjoint(); }

DiscretizedOperator build_hankel(const CausalKernel& g, const TimeGrid& grid) {
  CausalKernel kernel = g.resampled(grid);
  const int n = grid.n;
  std::vector<Mat> table(2 * n - 1);
  // entries reach out to 2T; value() falls back to the exponential sum or zero
  for (int d = 0; d < 2 * n - 1; ++d) table[d] = kernel.value(d * grid.h);
  return DiscretizedOperator::hankel(std::move(table), grid, "H_F");
}

FullLineKernel tr_kernel(const WienerPlusFunction& g) {
  const Mat& d = g.at_infinity();
  AnticausalKernel gstar = adjoint_flip(g.kernel());
  FullLineKernel conv = convolve(g.kernel(), gstar);
  CausalKernel pos = add(conv.pos, g.kernel().right_multiplied(d.adjoint()));
  AnticausalKernel neg = conv.neg;
  {
    AnticausalKernel dgs = gstar.left_multiplied(d);
    std::vector<Mat> samples(neg.grid().n);
    for (int i = 0; i < neg.grid().n; ++i) samples[i] = neg.sample(i) + dgs.sample(i);
    AnticausalKernel combined = AnticausalKernel::from_samples(neg.grid(), std::move(samples));
    if (neg.has_exp_sum() && dgs.has_exp_sum()) {
      std::vector<ExpTerm> terms = neg.exp_terms();
      for (const auto& t : dgs.exp_terms()) {
        bool merged = false;
        for (auto& u : terms)
          if (std::abs(u.pole - t.pole) < 1e-10) {
            u.coeff += t.coeff;
            merged = true;
            break;
          }
        if (!merged) terms.push_back(t);
      }
      combined = AnticausalKernel::from_exp_sum(neg.grid(), std::move(terms));
    }
    neg = std::move(combined);
  }
  return {std::move(pos), std::move(neg)};
}

DiscretizedOperator build_TR(const WienerPlusFunction& g, const TimeGrid& grid) {
  WienerPlusFunction gg(g.at_infinity(), g.kernel().resampled(grid));
  Mat dr = gg.at_infinity() * gg.at_infinity().adjoint();
  return build_wiener_hopf(dr, tr_kernel(gg), "T_R");
}

// ---------------------------------------------------------------------------
// LinOp plumbing

LinOp as_linop(const DiscretizedOperator& op) {
  auto sp = std::make_shared<DiscretizedOperator>(op);
  LinOp l;
  l.rows = op.rows();
  l.cols = op.cols();
  l.apply = [sp](const Vec& v) { return sp->apply(v); };
  l.apply_adjoint = [sp](const Vec& v) { return sp->apply_adjoint(v); };
  if (op.kind() == OperatorKind::Composite) l.dense = sp->dense_ptr();
  return l;
}

LinOp as_linop(Mat dense) {
  auto sp = std::make_shared<const Mat>(std::move(dense));
  LinOp l;
  l.rows = sp->rows();
  l.cols = sp->cols();
  l.apply = [sp](const Vec& v) -> Vec { return (*sp) * v; };
  l.apply_adjoint = [sp](const Vec& v) -> Vec { return sp->adjoint() * v; };
  l.dense = sp;
  return l;
}

LinOp identity_linop(Eigen::Index n) {
  LinOp l;
  l.rows = l.cols = n;
  l.apply = [](const Vec& v) { return v; };
  l.apply_adjoint = [](const Vec& v) { return v; };
  return l;
}

namespace {

bool causal_table(const DiscretizedOperator& a) {
  if (a.kind() != OperatorKind::WienerHopf) return false;
  const int n = a.grid().n;
  for (int d = 1; d < n; ++d)
    if (a.table_at(n - 1 - d).norm() != 0.0) return false;
  return true;
}

// Dense T T^* for a causal Wiener-Hopf section, assembled from sliding
// correlation sums in O(N^2) block operations instead of a large GEMM.
// Reproduces the product matrix exactly.
Mat materialize_normal_causal(const DiscretizedOperator& a) {
  const TimeGrid& grid = a.grid();
  const int n = grid.n;
  const int m = a.block_rows();
  const Mat& d = a.constant();
  const auto sw = grid.sqrt_weights();
  const double h = grid.h;
  auto kk = [&](int lag) -> const Mat& { return a.table_at(n - 1 + lag); };

  Mat dd = d * d.adjoint();
  Mat out(static_cast<Eigen::Index>(m) * n, static_cast<Eigen::Index>(m) * n);
  for (int diff = 0; diff < n; ++diff) {
    Mat q = Mat::Zero(m, m);  // running sum over l <= j of k(t_{l+diff}) k(t_l)^*
    for (int j = 0; j + diff < n; ++j) {
      const int i = j + diff;
      Mat head = kk(i) * kk(j).adjoint();  // l = j term
      q.noalias() += head;
      // trapezoid weights: h everywhere, h/2 at the first and last nodes
      Mat c = h * q - 0.5 * h * head;
      if (j == n - 1) c -= 0.5 * h * (kk(diff) * kk(0).adjoint());
      Mat block = sw[i] * sw[j] * c;
      if (diff == 0)
        block += dd + sw[i] * sw[j] * (d * kk(0).adjoint() + kk(0) * d.adjoint());
      else
        block += sw[i] * sw[j] * (kk(diff) * d.adjoint());
      out.block(static_cast<Eigen::Index>(i) * m, static_cast<Eigen::Index>(j) * m, m, m) = block;
      if (diff > 0)
        out.block(static_cast<Eigen::Index>(j) * m, static_cast<Eigen::Index>(i) * m, m, m) =
            block.adjoint();
    }
  }
  return out;
}

}  // namespace

LinOp normal_linop(const DiscretizedOperator& a) {
  if (a.dense_feasible()) {
    const Mat& ad = a.dense();
    Mat m = ad * ad.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();  // remove quadrature asymmetry
    return as_linop(std::move(m));
  }
  if (a.rows() <= kDenseLimit && causal_table(a)) {
    Mat m = materialize_normal_causal(a);
    m = 0.5 * (m + m.adjoint()).eval();
    return as_linop(std::move(m));
  }
  auto sp = std::make_shared<DiscretizedOperator>(a);
  LinOp l;
  l.rows = l.cols = a.rows();
  l.apply = [sp](const Vec& v) { return sp->apply(sp->apply_adjoint(v)); };
  l.apply_adjoint = l.apply;
  return l;
}

LinOp compose(const LinOp& a, const LinOp& b) {
  if (a.cols != b.rows) throw std::invalid_argument("compose: dimension mismatch");
  LinOp l;
  l.rows = a.rows;
  l.cols = b.cols;
  auto as = a, bs = b;
  l.apply = [as, bs](const Vec& v) { return as.apply(bs.apply(v)); };
  l.apply_adjoint = [as, bs](const Vec& v) { return bs.apply_adjoint(as.apply_adjoint(v)); };
  if (a.dense && b.dense) l.dense = std::make_shared<const Mat>((*a.dense) * (*b.dense));
  return l;
}

LinOp subtract(const LinOp& a, const LinOp& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw std::invalid_argument("subtract: dimension mismatch");
  LinOp l;
  l.rows = a.rows;
  l.cols = a.cols;
  auto as = a, bs = b;
  l.apply = [as, bs](const Vec& v) -> Vec { return as.apply(v) - bs.apply(v); };
  l.apply_adjoint = [as, bs](const Vec& v) -> Vec { return as.apply_adjoint(v) - bs.apply_adjoint(v); };
  if (a.dense && b.dense) l.dense = std::make_shared<const Mat>((*a.dense) - (*b.dense));
  return l;
}

Vec pack_weighted_column(const CausalKernel& k, int col, const TimeGrid& grid) {
  const int n = grid.n;
  const int rows = k.rows();
  Vec v(static_cast<Eigen::Index>(n) * rows);
  for (int i = 0; i < n; ++i) {
    const double sw = std::sqrt(grid.weight(i));
    for (int r = 0; r < rows; ++r) v(static_cast<Eigen::Index>(i) * rows + r) = sw * k.sample(i)(r, col);
  }
  return v;
}

void unpack_weighted_column(const Vec& v, int block_rows, const TimeGrid& grid, int col,
                            std::vector<Mat>& out) {
  for (int i = 0; i < grid.n; ++i) {
    const double sw = std::sqrt(grid.weight(i));
    for (int r = 0; r < block_rows; ++r)
      out[i](r, col) = v(static_cast<Eigen::Index>(i) * block_rows + r) / sw;
  }
}

Vec apply_rowexact(const DiscretizedOperator& op, const Vec& v) {
  if (op.kind() != OperatorKind::WienerHopf)
    throw std::invalid_argument("apply_rowexact: only Wiener-Hopf operators carry the row correction");
  Vec out = op.apply(v);
  const int n = op.grid().n;
  const int m = op.block_rows(), p = op.block_cols();
  const double q = 0.25 * op.grid().h;
  // first row integrates the negative side only, last row the positive side
  Mat first = q * (op.kernel_zero_neg() - op.kernel_zero_pos());
  Mat last = q * (op.kernel_zero_pos() - op.kernel_zero_neg());
  out.segment(0, m) += first * v.segment(0, p);
  out.segment(static_cast<Eigen::Index>(n - 1) * m, m) +=
      last * v.segment(static_cast<Eigen::Index>(n - 1) * p, p);
  return out;
}

Vec apply_rowexact_adjoint(const DiscretizedOperator& op, const Vec& v) {
  return apply_rowexact(op.adjoint(), v);
}

NormalSolver::NormalSolver(const DiscretizedOperator& tf, const SpdSolveConfig& cfg)
    : tf_(tf), adj_(tf.adjoint()), normal_(normal_linop(tf)), cfg_(cfg) {
  if (normal_.dense && cfg.method != SpdSolveConfig::Method::ConjugateGradient) {
    factor_ = std::make_shared<SpdFactor>(*normal_.dense);
    if (!factor_->positive_definite())
      throw std::runtime_error("NormalSolver: T_F T_F^* is numerically indefinite or singular");
  }
}

Vec NormalSolver::inner_solve(const Vec& rhs) const {
  if (factor_) return factor_->solve(rhs);
  return spd_solve(normal_, rhs, cfg_);
}

Vec NormalSolver::solve_refined(const Vec& rhs, SolveStats* stats) const {
  if (rhs.norm() == 0.0) {
    if (stats) *stats = {0, 0.0};
    return Vec::Zero(rhs.size());
  }
  auto target = [&](const Vec& x) { return apply_rowexact(tf_, apply_rowexact(adj_, x)); };
  Vec x = inner_solve(rhs);
  for (int pass = 0; pass < kNormalRefinementPasses; ++pass) x += inner_solve(rhs - target(x));
  double res = (rhs - target(x)).norm() / rhs.norm();
  if (stats) *stats = {kNormalRefinementPasses + 1, res};
  return x;
}

Vec solve_normal_refined(const DiscretizedOperator& tf, const Vec& rhs, const SpdSolveConfig& cfg,
                         SolveStats* stats) {
  return NormalSolver(tf, cfg).solve_refined(rhs, stats);
}

// ---------------------------------------------------------------------------
// SpdFactor

SpdFactor::SpdFactor(const Mat& hermitian) {
  ldlt_.compute(hermitian);
  factorized_ = ldlt_.info() == Eigen::Success;
  if (factorized_) {
    min_pivot_ = ldlt_.vectorD().real().minCoeff();
    positive_ = min_pivot_ > 0.0;
  }
}

Vec SpdFactor::solve(const Vec& rhs) const { return ldlt_.solve(rhs); }
Mat SpdFactor::solve(const Mat& rhs) const { return ldlt_.solve(rhs); }

// ---------------------------------------------------------------------------
// Solvers and spectra

namespace {

void check_hermitian_dense(const Mat& a) {
  double scale = a.norm();
  if (scale == 0.0) return;
  if ((a - a.adjoint()).norm() > 1e-8 * scale)
    throw std::invalid_argument("operator is not numerically Hermitian");
}

void check_hermitian_probe(const LinOp& t) {
  Rng rng(kIterationSeed + 17);
  Vec x = rng.unit_vector(t.cols);
  Vec y = rng.unit_vector(t.cols);
  Vec tx = t.apply(x);
  Vec ty = t.apply(y);
  cx lhs = y.dot(tx);  // <Tx, y>
  cx rhs = ty.dot(x);  // <x, Ty>
  double scale = std::max({std::abs(lhs), std::abs(rhs), tx.norm(), 1e-300});
  if (std::abs(lhs - rhs) > 1e-7 * scale)
    throw std::invalid_argument("operator is not numerically Hermitian");
}

Vec cg_solve(const LinOp& t, const Vec& rhs, double rel_tol, int max_iters, SolveStats* stats) {
  const double bnorm = rhs.norm();
  Vec x = Vec::Zero(rhs.size());
  if (bnorm == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  Vec r = rhs;
  Vec p = r;
  double rs = r.squaredNorm();
  int it = 0;
  for (; it < max_iters; ++it) {
    if (std::sqrt(rs) <= rel_tol * bnorm) break;
    Vec tp = t.apply(p);
    cx denom = p.dot(tp);
    if (!(denom.real() > 0.0))
      throw std::runtime_error("spd_solve: operator is not positive definite");
    double alpha = rs / denom.real();
    x += alpha * p;
    r -= alpha * tp;
    double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
  }
  double res = std::sqrt(rs) / bnorm;
  if (stats) *stats = {it, res};
  if (res > rel_tol && it >= max_iters)
    throw std::runtime_error("spd_solve: conjugate gradient iteration budget exceeded");
  return x;
}

std::pair<double, double> tridiag_extremes(const std::vector<double>& alpha,
                                            const std::vector<double>& beta) {
  const int k = static_cast<int>(alpha.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    tri(i, i) = alpha[i];
    if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri, Eigen::EigenvaluesOnly);
  return {es.eigenvalues()(0), es.eigenvalues()(k - 1)};
}

// Bottom and top Ritz values from reorthogonalized Lanczos, with an early
// exit once both edges have settled.
std::pair<double, double> lanczos_extremes(const LinOp& t, int steps) {
  const Eigen::Index n = t.rows;
  if (n == 0) return {0.0, 0.0};
  steps = static_cast<int>(std::min<Eigen::Index>(steps, n));
  Rng rng(kIterationSeed);
  std::vector<Vec> basis;
  basis.reserve(steps);
  basis.push_back(rng.unit_vector(n));
  std::vector<double> alpha, beta;
  std::pair<double, double> last{std::numeric_limits<double>::infinity(),
                                 -std::numeric_limits<double>::infinity()};
  for (int k = 0; k < steps; ++k) {
    Vec w = t.apply(basis[k]);
    double a = std::real(basis[k].dot(w));
    alpha.push_back(a);
    w -= a * basis[k];
    if (k > 0) w -= beta[k - 1] * basis[k - 1];
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : basis) w -= q.dot(w) * q;
    double b = w.norm();
    if (k + 1 == steps || b < 1e-13 * std::max(1.0, std::abs(a))) break;
    if ((k + 1) % 6 == 0) {
      auto cur = tridiag_extremes(alpha, beta);
      double scale = std::max({std::abs(cur.first), std::abs(cur.second), 1e-300});
      if (std::abs(cur.first - last.first) < 1e-6 * scale &&
          std::abs(cur.second - last.second) < 1e-6 * scale)
        break;
      last = cur;
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }
  if (beta.size() >= alpha.size()) beta.resize(alpha.size() - 1);
  return tridiag_extremes(alpha, beta);
}

}  // namespace

double min_eigenvalue_with_factor(const Mat& hermitized, const SpdFactor& factor) {
  Rng rng(kIterationSeed + 1);
  Vec v = rng.unit_vector(hermitized.rows());
  double lambda = 0.0, prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 100; ++it) {
    Vec w = factor.solve(v);
    double wn = w.norm();
    if (!std::isfinite(wn) || wn == 0.0) break;
    v = w / wn;
    lambda = std::real(v.dot(hermitized * v));
    if (std::abs(lambda - prev) <= 1e-9 * std::max(std::abs(lambda), 1e-300)) break;
    prev = lambda;
  }
  return lambda;
}

namespace {

// Shift-inverted (shift zero) iteration on a factorized dense operator. For
// positive semidefinite inputs the smallest-magnitude eigenvalue the
// iteration finds is the bottom of the spectrum.
double dense_min_eigenvalue(const Mat& hermitized) {
  SpdFactor factor(hermitized);
  if (!factor.factorized()) {
    LinOp l = as_linop(hermitized);
    return lanczos_extremes(l, 170).first;
  }
  return min_eigenvalue_with_factor(hermitized, factor);
}

}  // namespace

Vec spd_solve(const LinOp& t, const Vec& rhs, const SpdSolveConfig& cfg, SolveStats* stats) {
  if (!t.is_square() || t.rows != rhs.size()) throw std::invalid_argument("spd_solve: size mismatch");
  const bool dense = cfg.method == SpdSolveConfig::Method::DenseCholesky ||
                     (cfg.method == SpdSolveConfig::Method::Auto && t.dense != nullptr);
  if (dense) {
    if (!t.dense) throw std::invalid_argument("spd_solve: dense method requested without a dense matrix");
    check_hermitian_dense(*t.dense);
    Mat h = 0.5 * (*t.dense + t.dense->adjoint());
    SpdFactor factor(h);
    if (!factor.positive_definite())
      throw std::runtime_error("spd_solve: matrix is indefinite or singular");
    Vec x = factor.solve(rhs);
    double bnorm = rhs.norm();
    double res = bnorm == 0.0 ? 0.0 : (h * x - rhs).norm() / bnorm;
    if (stats) *stats = {1, res};
    if (res > std::max(cfg.rel_tol, 1e-9))
      throw std::runtime_error("spd_solve: dense solve residual above tolerance");
    return x;
  }
  return cg_solve(t, rhs, cfg.rel_tol, cfg.max_iterations, stats);
}

Mat spd_solve(const LinOp& t, const Mat& rhs, const SpdSolveConfig& cfg, SolveStats* stats) {
  if (cfg.method == SpdSolveConfig::Method::DenseCholesky && !t.dense)
    throw std::invalid_argument("spd_solve: dense method requested without a dense matrix");
  Mat x(rhs.rows(), rhs.cols());
  SolveStats worst{0, 0.0};
  if (t.dense && cfg.method != SpdSolveConfig::Method::ConjugateGradient) {
    check_hermitian_dense(*t.dense);
    Mat h = 0.5 * (*t.dense + t.dense->adjoint());
    SpdFactor factor(h);
    if (!factor.positive_definite())
      throw std::runtime_error("spd_solve: matrix is indefinite or singular");
    x = factor.solve(rhs);
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      double bnorm = rhs.col(c).norm();
      double res = bnorm == 0.0 ? 0.0 : (h * x.col(c) - rhs.col(c)).norm() / bnorm;
      worst.residual = std::max(worst.residual, res);
      worst.iterations = 1;
    }
  } else {
    for (Eigen::Index c = 0; c < rhs.cols(); ++c) {
      SolveStats s;
      x.col(c) = cg_solve(t, rhs.col(c), cfg.rel_tol, cfg.max_iterations, &s);
      worst.iterations = std::max(worst.iterations, s.iterations);
      worst.residual = std::max(worst.residual, s.residual);
    }
  }
  if (stats) *stats = worst;
  return x;
}

Vec spd_solve(const DiscretizedOperator& t, const Vec& rhs, const SpdSolveConfig& cfg,
              SolveStats* stats) {
  LinOp l = as_linop(t);
  if (t.dense_feasible()) l.dense = t.dense_ptr();
  return spd_solve(l, rhs, cfg, stats);
}

double min_eigenvalue(const LinOp& t) {
  if (!t.is_square()) throw std::invalid_argument("min_eigenvalue: operator must be square");
  if (t.dense) {
    check_hermitian_dense(*t.dense);
    Mat h = 0.5 * (*t.dense + t.dense->adjoint());
    return dense_min_eigenvalue(h);
  }
  check_hermitian_probe(t);
  return lanczos_extremes(t, 170).first;
}

double min_eigenvalue(const DiscretizedOperator& t) {
  LinOp l = as_linop(t);
  if (t.dense_feasible()) l.dense = t.dense_ptr();
  return min_eigenvalue(l);
}

double max_eigenvalue(const LinOp& t) {
  if (!t.is_square()) throw std::invalid_argument("max_eigenvalue: operator must be square");
  if (t.dense) {
    Mat h = 0.5 * (*t.dense + t.dense->adjoint());
    LinOp l = as_linop(std::move(h));
    return lanczos_extremes(l, 120).second;
  }
  check_hermitian_probe(t);
  return lanczos_extremes(t, 120).second;
}

std::pair<double, double> hermitian_extremes(const LinOp& t) {
  if (!t.is_square()) throw std::invalid_argument("hermitian_extremes: operator must be square");
  if (t.dense) {
    check_hermitian_dense(*t.dense);
    Mat h = 0.5 * (*t.dense + t.dense->adjoint());
    double top = lanczos_extremes(as_linop(h), 120).second;
    return {dense_min_eigenvalue(h), top};
  }
  check_hermitian_probe(t);
  return lanczos_extremes(t, 170);
}

std::vector<double> top_singular_values(const LinOp& t, int k, int iterations) {
  const Eigen::Index nc = t.cols;
  if (t.rows == 0 || nc == 0) return std::vector<double>(k, 0.0);
  const int b = static_cast<int>(std::min<Eigen::Index>(k == 1 ? 1 : k + 2, nc));
  Rng rng(kIterationSeed + 2);
  Mat v = rng.cgaussian_matrix(nc, b);
  {
    Eigen::HouseholderQR<Mat> qr(v);
    v = qr.householderQ() * Mat::Identity(nc, b);
  }
  double prev_top = -1.0;
  for (int it = 0; it < iterations; ++it) {
    Mat w(t.rows, b);
    for (int c = 0; c < b; ++c) w.col(c) = t.apply(v.col(c));
    Eigen::HouseholderQR<Mat> qrw(w);
    double top = qrw.matrixQR().diagonal().cwiseAbs().maxCoeff();
    w = qrw.householderQ() * Mat::Identity(t.rows, b);
    Mat v2(nc, b);
    for (int c = 0; c < b; ++c) v2.col(c) = t.apply_adjoint(w.col(c));
    Eigen::HouseholderQR<Mat> qrv(v2);
    v = qrv.householderQ() * Mat::Identity(nc, b);
    if (std::abs(top - prev_top) < 1e-8 * std::max(top, 1e-300) && it >= 3) break;
    prev_top = top;
  }
  Mat w(t.rows, b);
  for (int c = 0; c < b; ++c) w.col(c) = t.apply(v.col(c));
  Eigen::JacobiSVD<Mat> svd(w);
  std::vector<double> out;
  for (int i = 0; i < std::min(k, b); ++i) out.push_back(svd.singularValues()(i));
  return out;
}

double operator_norm(const LinOp& t) {
  if (t.rows == 0 || t.cols == 0) return 0.0;
  return top_singular_values(t, 1, 60)[0];
}

double operator_norm(const DiscretizedOperator& t) { return operator_norm(as_linop(t)); }

DecompositionResidual decomposition_residual(const WienerPlusFunction& g, const TimeGrid& grid) {
  DiscretizedOperator tr = build_TR(g, grid);
  DiscretizedOperator tg = build_wiener_hopf(g, grid);
  DiscretizedOperator hg = build_hankel(g.kernel(), grid);
  const Mat& trd = tr.dense();
  const Mat& tgd = tg.dense();
  const Mat& hgd = hg.dense();
  Mat diff = trd - tgd * tgd.adjoint() - hgd * hgd.adjoint();
  DecompositionResidual out;
  out.frobenius = diff.norm();
  out.spectral = operator_norm(as_linop(std::move(diff)));
  double tr_fro = trd.norm();
  double tr_spec = operator_norm(as_linop(trd));
  out.frobenius_rel = tr_fro == 0.0 ? out.frobenius : out.frobenius / tr_fro;
  out.spectral_rel = tr_spec == 0.0 ? out.spectral : out.spectral / tr_spec;
  return out;
}

}  // namespace wbz
