#ifndef WBZ_KERNEL_HPP
#define WBZ_KERNEL_HPP

#include <optional>
#include <vector>

#include "wbz/types.hpp"

namespace wbz {

// One term of an exponential sum. For a causal kernel the term reads
// coeff * exp(-pole * t) on t >= 0; for an anticausal kernel it reads
// coeff * exp(+pole * t) on t <= 0. In both cases Re pole > 0.
struct ExpTerm {
  Mat coeff;
  cx pole;
};

class AnticausalKernel;

// Matrix kernel supported on [0, oo), carried as uniform samples on a
// TimeGrid and optionally as an exact exponential sum.
class CausalKernel {
 public:
  CausalKernel() = default;

  static CausalKernel zero(int rows, int cols, const TimeGrid& grid);
  static CausalKernel from_samples(const TimeGrid& grid, std::vector<Mat> samples);
  static CausalKernel from_exp_sum(const TimeGrid& grid, std::vector<ExpTerm> terms);
  // Keeps both representations; throws if they disagree beyond 1e-12 relative.
  static CausalKernel from_samples_and_terms(const TimeGrid& grid, std::vector<Mat> samples,
                                             std::vector<ExpTerm> terms);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const TimeGrid& grid() const { return grid_; }
  bool empty() const { return samples_.empty(); }

  const Mat& sample(int i) const { return samples_[i]; }
  const std::vector<Mat>& samples() const { return samples_; }

  bool has_exp_sum() const { return has_exp_; }
  const std::vector<ExpTerm>& exp_terms() const { return terms_; }

  // Value at an arbitrary time >= 0. Uses the exponential sum when present;
  // otherwise the nearest grid sample inside the horizon and zero beyond it.
  Mat value(double t) const;

  // Estimated mass of the truncated tail, integral over (horizon, oo) of the
  // Frobenius norm. Exact for exponential sums, last-sample heuristic otherwise.
  double tail_mass() const;

  CausalKernel resampled(const TimeGrid& grid) const;  // requires exponential sum
  CausalKernel scaled(cx factor) const;
  CausalKernel left_multiplied(const Mat& a) const;   // a * k(t)
  CausalKernel right_multiplied(const Mat& a) const;  // k(t) * a

  friend CausalKernel add(const CausalKernel& a, const CausalKernel& b);

 private:
  int rows_ = 0, cols_ = 0;
  TimeGrid grid_;
  std::vector<Mat> samples_;
  std::vector<ExpTerm> terms_;
  bool has_exp_ = false;

  void validate() const;
};

// Matrix kernel supported on (-oo, 0]; sample(i) is the value at t = -i*h.
class AnticausalKernel {
 public:
  AnticausalKernel() = default;

  static AnticausalKernel zero(int rows, int cols, const TimeGrid& grid);
  static AnticausalKernel from_samples(const TimeGrid& grid, std::vector<Mat> samples);
  static AnticausalKernel from_exp_sum(const TimeGrid& grid, std::vector<ExpTerm> terms);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const TimeGrid& grid() const { return grid_; }
  bool empty() const { return samples_.empty(); }

  const Mat& sample(int i) const { return samples_[i]; }  // value at t = -i*h
  const std::vector<Mat>& samples() const { return samples_; }

  bool has_exp_sum() const { return has_exp_; }
  const std::vector<ExpTerm>& exp_terms() const { return terms_; }

  Mat value(double t) const;  // t <= 0
  double tail_mass() const;

  AnticausalKernel scaled(cx factor) const;
  AnticausalKernel left_multiplied(const Mat& a) const;
  AnticausalKernel right_multiplied(const Mat& a) const;

 private:
  int rows_ = 0, cols_ = 0;
  TimeGrid grid_;
  std::vector<Mat> samples_;
  std::vector<ExpTerm> terms_;
  bool has_exp_ = false;

  void validate() const;
};

// Kernel on the whole line, split into one-sided parts. Both parts carry their
// own one-sided value at t = 0.
struct FullLineKernel {
  CausalKernel pos;
  AnticausalKernel neg;

  int rows() const { return pos.rows(); }
  int cols() const { return pos.cols(); }
  const TimeGrid& grid() const { return pos.grid(); }
};

struct KernelNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double kappa = 0.0;
};

// Laplace/Fourier transform: integral over the support of e^{-s t} k(t) dt.
// Exact for exponential sums, composite trapezoid otherwise.
Mat eval_transform(const CausalKernel& k, cx s);   // Re s >= 0
Mat eval_transform(const AnticausalKernel& k, cx s);  // Re s <= 0

// Transform of the piecewise-linear interpolant of the samples; agrees with
// the trapezoid value as s h -> 0 but stays accurate at frequencies where
// plain trapezoid aliases. Exact for exponential sums.
Mat eval_transform_filon(const CausalKernel& k, cx s);

// g*(t) = g(-t)^* entrywise conjugate transpose.
AnticausalKernel adjoint_flip(const CausalKernel& g);
CausalKernel adjoint_flip(const AnticausalKernel& g);

// Convolution products (f star g)(t) = integral f(t - tau) g(tau) dtau.
// Same support class composes; mixed supports produce a full-line kernel.
// Exponential-sum inputs stay exponential sums unless poles collide.
CausalKernel convolve(const CausalKernel& f, const CausalKernel& g);
AnticausalKernel convolve(const AnticausalKernel& f, const AnticausalKernel& g);
FullLineKernel convolve(const CausalKernel& f, const AnticausalKernel& g);
FullLineKernel convolve(const AnticausalKernel& f, const CausalKernel& g);

KernelNorms norms(const CausalKernel& k);
KernelNorms norms(const AnticausalKernel& k);
KernelNorms norms(const FullLineKernel& k);

}  // namespace wbz

#endif
