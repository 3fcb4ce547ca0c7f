#include "wbz/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace wbz {

namespace {

constexpr double kPoleCollisionTol = 1e-10;

Mat eval_exp_sum_causal(const std::vector<ExpTerm>& terms, int rows, int cols, double t) {
  Mat v = Mat::Zero(rows, cols);
  for (const auto& term : terms) v += term.coeff * std::exp(-term.pole * t);
  return v;
}

Mat eval_exp_sum_anticausal(const std::vector<ExpTerm>& terms, int rows, int cols, double t) {
  Mat v = Mat::Zero(rows, cols);
  for (const auto& term : terms) v += term.coeff * std::exp(term.pole * t);
  return v;
}

void check_terms(const std::vector<ExpTerm>& terms, int rows, int cols) {
  for (const auto& term : terms) {
    if (term.coeff.rows() != rows || term.coeff.cols() != cols)
      throw std::invalid_argument("kernel: exponential-sum coefficient shape mismatch");
    if (!(term.pole.real() > 0.0) || !std::isfinite(term.pole.real()) || !std::isfinite(term.pole.imag()))
      throw std::invalid_argument("kernel: exponential-sum pole must have positive real part");
    if (!term.coeff.allFinite()) throw std::invalid_argument("kernel: non-finite coefficient");
  }
}

double exp_tail_mass(const std::vector<ExpTerm>& terms, double horizon) {
  double mass = 0.0;
  for (const auto& term : terms)
    mass += term.coeff.norm() * std::exp(-term.pole.real() * horizon) / term.pole.real();
  return mass;
}

// Last-sample geometric heuristic for sampled kernels.
double sample_tail_mass(const std::vector<Mat>& samples, double h) {
  const size_t n = samples.size();
  double last = samples[n - 1].norm();
  double prev = samples[n - 2].norm();
  if (last == 0.0) return 0.0;
  double ratio = prev > 0.0 ? last / prev : 0.0;
  ratio = std::clamp(ratio, 0.0, 0.999);
  return last * h / (1.0 - ratio);
}

std::vector<Mat> scaled_samples(const std::vector<Mat>& s, cx f) {
  std::vector<Mat> out(s.size());
  for (size_t i = 0; i < s.size(); ++i) out[i] = f * s[i];
  return out;
}

std::vector<ExpTerm> scaled_terms(const std::vector<ExpTerm>& t, cx f) {
  std::vector<ExpTerm> out(t.size());
  for (size_t i = 0; i < t.size(); ++i) out[i] = {f * t[i].coeff, t[i].pole};
  return out;
}

// Accumulate coeff at pole, merging with an existing pole when within tolerance.
void accumulate_term(std::vector<ExpTerm>& terms, const Mat& coeff, cx pole) {
  for (auto& t : terms) {
    if (std::abs(t.pole - pole) < kPoleCollisionTol) {
      t.coeff += coeff;
      return;
    }
  }
  terms.push_back({coeff, pole});
}

bool poles_disjoint(const std::vector<ExpTerm>& a, const std::vector<ExpTerm>& b) {
  for (const auto& ta : a)
    for (const auto& tb : b)
      if (std::abs(ta.pole - tb.pole) < kPoleCollisionTol) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// CausalKernel

void CausalKernel::validate() const {
  if (static_cast<int>(samples_.size()) != grid_.n)
    throw std::invalid_argument("CausalKernel: sample count does not match grid");
  for (const auto& s : samples_) {
    if (s.rows() != rows_ || s.cols() != cols_)
      throw std::invalid_argument("CausalKernel: sample shape mismatch");
    if (!s.allFinite()) throw std::invalid_argument("CausalKernel: non-finite sample");
  }
}

CausalKernel CausalKernel::zero(int rows, int cols, const TimeGrid& grid) {
  CausalKernel k;
  k.rows_ = rows;
  k.cols_ = cols;
  k.grid_ = grid;
  k.samples_.assign(grid.n, Mat::Zero(rows, cols));
  return k;
}

CausalKernel CausalKernel::from_samples(const TimeGrid& grid, std::vector<Mat> samples) {
  if (samples.empty()) throw std::invalid_argument("CausalKernel: empty sample list");
  CausalKernel k;
  k.rows_ = static_cast<int>(samples[0].rows());
  k.cols_ = static_cast<int>(samples[0].cols());
  k.grid_ = grid;
  k.samples_ = std::move(samples);
  k.validate();
  return k;
}

CausalKernel CausalKernel::from_exp_sum(const TimeGrid& grid, std::vector<ExpTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("CausalKernel: empty exponential sum");
  const int rows = static_cast<int>(terms[0].coeff.rows());
  const int cols = static_cast<int>(terms[0].coeff.cols());
  check_terms(terms, rows, cols);
  CausalKernel k;
  k.rows_ = rows;
  k.cols_ = cols;
  k.grid_ = grid;
  k.terms_ = std::move(terms);
  k.has_exp_ = true;
  k.samples_.resize(grid.n);
  for (int i = 0; i < grid.n; ++i) k.samples_[i] = eval_exp_sum_causal(k.terms_, rows, cols, grid.t(i));
  k.validate();
  return k;
}

CausalKernel CausalKernel::from_samples_and_terms(const TimeGrid& grid, std::vector<Mat> samples,
                                                  std::vector<ExpTerm> terms) {
  CausalKernel k = from_samples(grid, std::move(samples));
  check_terms(terms, k.rows_, k.cols_);
  double scale = 0.0, diff = 0.0;
  for (int i = 0; i < grid.n; ++i) {
    Mat v = eval_exp_sum_causal(terms, k.rows_, k.cols_, grid.t(i));
    scale = std::max(scale, k.samples_[i].norm());
    diff = std::max(diff, (v - k.samples_[i]).norm());
  }
  if (diff > 1e-12 * std::max(scale, 1.0))
    throw std::invalid_argument("CausalKernel: samples disagree with exponential sum");
  k.terms_ = std::move(terms);
  k.has_exp_ = true;
  return k;
}

Mat CausalKernel::value(double t) const {
  if (t < 0.0) return Mat::Zero(rows_, cols_);
  if (has_exp_) return eval_exp_sum_causal(terms_, rows_, cols_, t);
  if (t > grid_.horizon() + 0.5 * grid_.h) return Mat::Zero(rows_, cols_);
  int i = static_cast<int>(std::lround(t / grid_.h));
  i = std::clamp(i, 0, grid_.n - 1);
  return samples_[i];
}

double CausalKernel::tail_mass() const {
  if (has_exp_) return exp_tail_mass(terms_, grid_.horizon());
  return sample_tail_mass(samples_, grid_.h);
}

CausalKernel CausalKernel::resampled(const TimeGrid& grid) const {
  if (grid == grid_) return *this;
  if (!has_exp_) {
    bool all_zero = true;
    for (const auto& s : samples_)
      if (s.norm() != 0.0) {
        all_zero = false;
        break;
      }
    if (all_zero) return zero(rows_, cols_, grid);
    throw std::invalid_argument("CausalKernel: cannot resample a sampled-only kernel");
  }
  return from_exp_sum(grid, terms_);
}

CausalKernel CausalKernel::scaled(cx factor) const {
  CausalKernel k = *this;
  k.samples_ = scaled_samples(samples_, factor);
  if (has_exp_) k.terms_ = scaled_terms(terms_, factor);
  if (factor == cx(0.0, 0.0)) {
    k.terms_.clear();
    k.has_exp_ = false;
  }
  return k;
}

CausalKernel CausalKernel::left_multiplied(const Mat& a) const {
  if (a.cols() != rows_) throw std::invalid_argument("CausalKernel: left factor shape mismatch");
  CausalKernel k;
  k.rows_ = static_cast<int>(a.rows());
  k.cols_ = cols_;
  k.grid_ = grid_;
  k.samples_.resize(samples_.size());
  for (size_t i = 0; i < samples_.size(); ++i) k.samples_[i] = a * samples_[i];
  if (has_exp_) {
    k.has_exp_ = true;
    k.terms_.resize(terms_.size());
    for (size_t i = 0; i < terms_.size(); ++i) k.terms_[i] = {a * terms_[i].coeff, terms_[i].pole};
  }
  return k;
}

CausalKernel CausalKernel::right_multiplied(const Mat& a) const {
  if (a.rows() != cols_) throw std::invalid_argument("CausalKernel: right factor shape mismatch");
  CausalKernel k;
  k.rows_ = rows_;
  k.cols_ = static_cast<int>(a.cols());
  k.grid_ = grid_;
  k.samples_.resize(samples_.size());
  for (size_t i = 0; i < samples_.size(); ++i) k.samples_[i] = samples_[i] * a;
  if (has_exp_) {
    k.has_exp_ = true;
    k.terms_.resize(terms_.size());
    for (size_t i = 0; i < terms_.size(); ++i) k.terms_[i] = {terms_[i].coeff * a, terms_[i].pole};
  }
  return k;
}

CausalKernel add(const CausalKernel& a, const CausalKernel& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_ || a.grid_ != b.grid_)
    throw std::invalid_argument("add: kernel shape or grid mismatch");
  CausalKernel k = a;
  for (size_t i = 0; i < k.samples_.size(); ++i) k.samples_[i] += b.samples_[i];
  if (a.has_exp_ && b.has_exp_) {
    for (const auto& t : b.terms_) accumulate_term(k.terms_, t.coeff, t.pole);
  } else {
    k.terms_.clear();
    k.has_exp_ = false;
  }
  return k;
}

// ---------------------------------------------------------------------------
// AnticausalKernel

void AnticausalKernel::validate() const {
  if (static_cast<int>(samples_.size()) != grid_.n)
    throw std::invalid_argument("AnticausalKernel: sample count does not match grid");
  for (const auto& s : samples_) {
    if (s.rows() != rows_ || s.cols() != cols_)
      throw std::invalid_argument("AnticausalKernel: sample shape mismatch");
    if (!s.allFinite()) throw std::invalid_argument("AnticausalKernel: non-finite sample");
  }
}

AnticausalKernel AnticausalKernel::zero(int rows, int cols, const TimeGrid& grid) {
  AnticausalKernel k;
  k.rows_ = rows;
  k.cols_ = cols;
  k.grid_ = grid;
  k.samples_.assign(grid.n, Mat::Zero(rows, cols));
  return k;
}

AnticausalKernel AnticausalKernel::from_samples(const TimeGrid& grid, std::vector<Mat> samples) {
  if (samples.empty()) throw std::invalid_argument("AnticausalKernel: empty sample list");
  AnticausalKernel k;
  k.rows_ = static_cast<int>(samples[0].rows());
  k.cols_ = static_cast<int>(samples[0].cols());
  k.grid_ = grid;
  k.samples_ = std::move(samples);
  k.validate();
  return k;
}

AnticausalKernel AnticausalKernel::from_exp_sum(const TimeGrid& grid, std::vector<ExpTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("AnticausalKernel: empty exponential sum");
  const int rows = static_cast<int>(terms[0].coeff.rows());
  const int cols = static_cast<int>(terms[0].coeff.cols());
  check_terms(terms, rows, cols);
  AnticausalKernel k;
  k.rows_ = rows;
  k.cols_ = cols;
  k.grid_ = grid;
  k.terms_ = std::move(terms);
  k.has_exp_ = true;
  k.samples_.resize(grid.n);
  for (int i = 0; i < grid.n; ++i)
    k.samples_[i] = eval_exp_sum_anticausal(k.terms_, rows, cols, -grid.t(i));
  k.validate();
  return k;
}

Mat AnticausalKernel::value(double t) const {
  if (t > 0.0) return Mat::Zero(rows_, cols_);
  if (has_exp_) return eval_exp_sum_anticausal(terms_, rows_, cols_, t);
  if (-t > grid_.horizon() + 0.5 * grid_.h) return Mat::Zero(rows_, cols_);
  int i = static_cast<int>(std::lround(-t / grid_.h));
  i = std::clamp(i, 0, grid_.n - 1);
  return samples_[i];
}

double AnticausalKernel::tail_mass() const {
  if (has_exp_) return exp_tail_mass(terms_, grid_.horizon());
  return sample_tail_mass(samples_, grid_.h);
}

AnticausalKernel AnticausalKernel::scaled(cx factor) const {
  AnticausalKernel k = *this;
  k.samples_ = scaled_samples(samples_, factor);
  if (has_exp_) k.terms_ = scaled_terms(terms_, factor);
  if (factor == cx(0.0, 0.0)) {
    k.terms_.clear();
    k.has_exp_ = false;
  }
  return k;
}

AnticausalKernel AnticausalKernel::left_multiplied(const Mat& a) const {
  if (a.cols() != rows_) throw std::invalid_argument("AnticausalKernel: left factor shape mismatch");
  AnticausalKernel k;
  k.rows_ = static_cast<int>(a.rows());
  k.cols_ = cols_;
  k.grid_ = grid_;
  k.samples_.resize(samples_.size());
  for (size_t i = 0; i < samples_.size(); ++i) k.samples_[i] = a * samples_[i];
  if (has_exp_) {
    k.has_exp_ = true;
    k.terms_.resize(terms_.size());
    for (size_t i = 0; i < terms_.size(); ++i) k.terms_[i] = {a * terms_[i].coeff, terms_[i].pole};
  }
  return k;
}

AnticausalKernel AnticausalKernel::right_multiplied(const Mat& a) const {
  if (a.rows() != cols_) throw std::invalid_argument("AnticausalKernel: right factor shape mismatch");
  AnticausalKernel k;
  k.rows_ = rows_;
  k.cols_ = static_cast<int>(a.cols());
  k.grid_ = grid_;
  k.samples_.resize(samples_.size());
  for (size_t i = 0; i < samples_.size(); ++i) k.samples_[i] = samples_[i] * a;
  if (has_exp_) {
    k.has_exp_ = true;
    k.terms_.resize(terms_.size());
    for (size_t i = 0; i < terms_.size(); ++i) k.terms_[i] = {terms_[i].coeff * a, terms_[i].pole};
  }
  return k;
}

// ---------------------------------------------------------------------------
// Transforms

Mat eval_transform(const CausalKernel& k, cx s) {
  if (k.empty()) throw std::invalid_argument("eval_transform: empty kernel");
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw std::invalid_argument("eval_transform: non-finite evaluation point");
  if (s.real() < 0.0) throw std::invalid_argument("eval_transform: Re s must be >= 0 for a causal kernel");
  if (k.has_exp_sum()) {
    Mat v = Mat::Zero(k.rows(), k.cols());
    for (const auto& term : k.exp_terms()) v += term.coeff / (s + term.pole);
    return v;
  }
  const TimeGrid& g = k.grid();
  Mat v = Mat::Zero(k.rows(), k.cols());
  for (int i = 0; i < g.n; ++i) v += g.weight(i) * std::exp(-s * g.t(i)) * k.sample(i);
  return v;
}

Mat eval_transform(const AnticausalKernel& k, cx s) {
  if (k.empty()) throw std::invalid_argument("eval_transform: empty kernel");
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw std::invalid_argument("eval_transform: non-finite evaluation point");
  if (s.real() > 0.0)
    throw std::invalid_argument("eval_transform: Re s must be <= 0 for an anticausal kernel");
  if (k.has_exp_sum()) {
    Mat v = Mat::Zero(k.rows(), k.cols());
    for (const auto& term : k.exp_terms()) v += term.coeff / (term.pole - s);
    return v;
  }
  const TimeGrid& g = k.grid();
  Mat v = Mat::Zero(k.rows(), k.cols());
  for (int i = 0; i < g.n; ++i) v += g.weight(i) * std::exp(s * g.t(i)) * k.sample(i);
  return v;
}

Mat eval_transform_filon(const CausalKernel& k, cx s) {
  if (k.empty()) throw std::invalid_argument("eval_transform_filon: empty kernel");
  if (k.has_exp_sum()) return eval_transform(k, s);
  if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
    throw std::invalid_argument("eval_transform_filon: non-finite evaluation point");
  const TimeGrid& g = k.grid();
  const double h = g.h;
  const cx u = s * h;
  // weights of the exact integral of e^{-s tau} (1 - tau/h) and (tau/h) on [0, h]
  cx wa, wb;
  if (std::abs(u) < 1e-2) {
    wa = h * (0.5 - u / 6.0 + u * u / 24.0);
    wb = h * (0.5 - u / 3.0 + u * u / 8.0);
  } else {
    cx i1 = (1.0 - std::exp(-u)) / s;
    cx i2 = (1.0 - std::exp(-u) * (1.0 + u)) / (s * s);
    wb = i2 / h;
    wa = i1 - wb;
  }
  Mat sum = Mat::Zero(k.rows(), k.cols());
  for (int i = 0; i < g.n; ++i) sum += std::exp(-s * g.t(i)) * k.sample(i);
  Mat last = std::exp(-s * g.t(g.n - 1)) * k.sample(g.n - 1);
  return wa * (sum - last) + wb * std::exp(u) * (sum - k.sample(0));
}

// ---------------------------------------------------------------------------
// Adjoint flips

AnticausalKernel adjoint_flip(const CausalKernel& g) {
  std::vector<Mat> samples(g.grid().n);
  for (int i = 0; i < g.grid().n; ++i) samples[i] = g.sample(i).adjoint();
  AnticausalKernel out = AnticausalKernel::from_samples(g.grid(), std::move(samples));
  if (g.has_exp_sum()) {
    std::vector<ExpTerm> terms(g.exp_terms().size());
    for (size_t i = 0; i < terms.size(); ++i)
      terms[i] = {g.exp_terms()[i].coeff.adjoint(), std::conj(g.exp_terms()[i].pole)};
    out = AnticausalKernel::from_exp_sum(g.grid(), std::move(terms));
  }
  return out;
}

CausalKernel adjoint_flip(const AnticausalKernel& g) {
  std::vector<Mat> samples(g.grid().n);
  for (int i = 0; i < g.grid().n; ++i) samples[i] = g.sample(i).adjoint();
  CausalKernel out = CausalKernel::from_samples(g.grid(), std::move(samples));
  if (g.has_exp_sum()) {
    std::vector<ExpTerm> terms(g.exp_terms().size());
    for (size_t i = 0; i < terms.size(); ++i)
      terms[i] = {g.exp_terms()[i].coeff.adjoint(), std::conj(g.exp_terms()[i].pole)};
    out = CausalKernel::from_exp_sum(g.grid(), std::move(terms));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convolutions

namespace {

void check_conv(int fc, int gr, const TimeGrid& fg, const TimeGrid& gg) {
  if (fc != gr) throw std::invalid_argument("convolve: inner dimensions do not match");
  if (fg != gg) throw std::invalid_argument("convolve: kernels live on different grids");
}

// Trapezoid over [0, t_i] with both endpoints halved.
std::vector<Mat> causal_conv_samples(const CausalKernel& f, const CausalKernel& g) {
  const TimeGrid& grid = f.grid();
  const int n = grid.n;
  std::vector<Mat> out(n, Mat::Zero(f.rows(), g.cols()));
  for (int i = 1; i < n; ++i) {
    Mat acc = 0.5 * (f.sample(i) * g.sample(0) + f.sample(0) * g.sample(i));
    for (int j = 1; j < i; ++j) acc.noalias() += f.sample(i - j) * g.sample(j);
    out[i] = grid.h * acc;
  }
  return out;
}

}  // namespace

CausalKernel convolve(const CausalKernel& f, const CausalKernel& g) {
  check_conv(f.cols(), g.rows(), f.grid(), g.grid());
  if (f.has_exp_sum() && g.has_exp_sum() && poles_disjoint(f.exp_terms(), g.exp_terms())) {
    // term-by-term: C e^{-a t} * D e^{-b t} integrates to
    // C D (e^{-b t} - e^{-a t}) / (a - b)
    std::vector<ExpTerm> terms;
    for (const auto& tf : f.exp_terms()) {
      for (const auto& tg : g.exp_terms()) {
        Mat cd = tf.coeff * tg.coeff;
        cx denom = tf.pole - tg.pole;
        accumulate_term(terms, cd / denom, tg.pole);
        accumulate_term(terms, -cd / denom, tf.pole);
      }
    }
    return CausalKernel::from_exp_sum(f.grid(), std::move(terms));
  }
  return CausalKernel::from_samples(f.grid(), causal_conv_samples(f, g));
}

AnticausalKernel convolve(const AnticausalKernel& f, const AnticausalKernel& g) {
  check_conv(f.cols(), g.rows(), f.grid(), g.grid());
  // mirror of the causal case
  CausalKernel fm = adjoint_flip(f);
  CausalKernel gm = adjoint_flip(g);
  CausalKernel conv = convolve(gm, fm);  // (f*g)^* = g^* star f^*
  return adjoint_flip(conv);
}

FullLineKernel convolve(const CausalKernel& f, const AnticausalKernel& g) {
  check_conv(f.cols(), g.rows(), f.grid(), g.grid());
  const TimeGrid& grid = f.grid();
  const int n = grid.n;
  if (f.has_exp_sum() && g.has_exp_sum()) {
    // For t >= 0 the integral picks e^{-a t} / (a + b); for t <= 0 it picks
    // e^{+b t} / (a + b). Denominators have positive real part always.
    std::vector<ExpTerm> pos, neg;
    for (const auto& tf : f.exp_terms()) {
      for (const auto& tg : g.exp_terms()) {
        Mat cd = tf.coeff * tg.coeff;
        cx denom = tf.pole + tg.pole;
        accumulate_term(pos, cd / denom, tf.pole);
        accumulate_term(neg, cd / denom, tg.pole);
      }
    }
    return {CausalKernel::from_exp_sum(grid, std::move(pos)),
            AnticausalKernel::from_exp_sum(grid, std::move(neg))};
  }
  std::vector<Mat> pos(n), neg(n);
  // t = +i h: integral over tau in [-T, 0] of f(t - tau) g(tau)
  for (int i = 0; i < n; ++i) {
    Mat acc = Mat::Zero(f.rows(), g.cols());
    for (int j = 0; j < n; ++j) {
      double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      acc.noalias() += w * (f.value(grid.t(i) + grid.t(j)) * g.sample(j));
    }
    pos[i] = grid.h * acc;
  }
  // t = -i h: integrand supported on tau in [-T, -i h]
  for (int i = 0; i < n; ++i) {
    Mat acc = Mat::Zero(f.rows(), g.cols());
    for (int j = i; j < n; ++j) {
      double w = (j == i || j == n - 1) ? 0.5 : 1.0;
      acc.noalias() += w * (f.sample(j - i) * g.sample(j));
    }
    if (i == n - 1) acc.setZero();
    neg[i] = grid.h * acc;
  }
  return {CausalKernel::from_samples(grid, std::move(pos)),
          AnticausalKernel::from_samples(grid, std::move(neg))};
}

FullLineKernel convolve(const AnticausalKernel& f, const CausalKernel& g) {
  check_conv(f.cols(), g.rows(), f.grid(), g.grid());
  const TimeGrid& grid = f.grid();
  const int n = grid.n;
  if (f.has_exp_sum() && g.has_exp_sum()) {
    // D e^{+b t} star C e^{-a t}: e^{-a t}/(a + b) for t >= 0 and
    // e^{+b t}/(a + b) for t <= 0.
    std::vector<ExpTerm> pos, neg;
    for (const auto& tf : f.exp_terms()) {
      for (const auto& tg : g.exp_terms()) {
        Mat dc = tf.coeff * tg.coeff;
        cx denom = tf.pole + tg.pole;
        accumulate_term(pos, dc / denom, tg.pole);
        accumulate_term(neg, dc / denom, tf.pole);
      }
    }
    return {CausalKernel::from_exp_sum(grid, std::move(pos)),
            AnticausalKernel::from_exp_sum(grid, std::move(neg))};
  }
  std::vector<Mat> pos(n), neg(n);
  // t = +i h: integral over u in [0, T] of f(-u) g(t + u), g read out to 2T
  for (int i = 0; i < n; ++i) {
    Mat acc = Mat::Zero(f.rows(), g.cols());
    for (int j = 0; j < n; ++j) {
      double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
      acc.noalias() += w * (f.sample(j) * g.value(grid.t(i) + grid.t(j)));
    }
    pos[i] = grid.h * acc;
  }
  // t = -i h: integral over tau in [0, T - i h] of f(t - tau) g(tau)
  for (int i = 0; i < n; ++i) {
    Mat acc = Mat::Zero(f.rows(), g.cols());
    const int jmax = n - 1 - i;
    for (int j = 0; j <= jmax; ++j) {
      double w = (j == 0 || j == jmax) ? 0.5 : 1.0;
      acc.noalias() += w * (f.sample(i + j) * g.sample(j));
    }
    if (i == n - 1) acc.setZero();
    neg[i] = grid.h * acc;
  }
  return {CausalKernel::from_samples(grid, std::move(pos)),
          AnticausalKernel::from_samples(grid, std::move(neg))};
}

// ---------------------------------------------------------------------------
// Norms

namespace {

template <class K>
KernelNorms norms_impl(const K& k) {
  const TimeGrid& g = k.grid();
  KernelNorms out;
  double l2sq = 0.0;
  Eigen::MatrixXd entry_l1 = Eigen::MatrixXd::Zero(k.rows(), k.cols());
  for (int i = 0; i < g.n; ++i) {
    const double w = g.weight(i);
    out.l1 += w * k.sample(i).norm();
    l2sq += w * k.sample(i).squaredNorm();
    entry_l1 += w * k.sample(i).cwiseAbs();
  }
  out.l2 = std::sqrt(l2sq);
  out.kappa = entry_l1.norm();
  return out;
}

}  // namespace

KernelNorms norms(const CausalKernel& k) { return norms_impl(k); }
KernelNorms norms(const AnticausalKernel& k) { return norms_impl(k); }

KernelNorms norms(const FullLineKernel& k) {
  KernelNorms a = norms_impl(k.pos);
  KernelNorms b = norms_impl(k.neg);
  KernelNorms out;
  out.l1 = a.l1 + b.l1;
  out.l2 = std::sqrt(a.l2 * a.l2 + b.l2 * b.l2);
  out.kappa = std::sqrt(a.kappa * a.kappa + b.kappa * b.kappa);
  return out;
}

}  // namespace wbz
