#ifndef WBZ_WIENER_HPP
#define WBZ_WIENER_HPP

#include "wbz/kernel.hpp"

namespace wbz {

// F(s) = D_F + \int_0^oo e^{-st} f(t) dt with f causal; D_F is the value at
// infinity.
class WienerPlusFunction {
 public:
  WienerPlusFunction() = default;
  WienerPlusFunction(Mat constant, CausalKernel kernel);
  static WienerPlusFunction constant_only(Mat constant, const TimeGrid& grid);

  int rows() const { return static_cast<int>(constant_.rows()); }
  int cols() const { return static_cast<int>(constant_.cols()); }
  const TimeGrid& grid() const { return kernel_.grid(); }
  const Mat& at_infinity() const { return constant_; }
  const CausalKernel& kernel() const { return kernel_; }

 private:
  Mat constant_;
  CausalKernel kernel_;
};

// Value at a point of the closed right half plane; the sentinel
// infinity_point() returns the constant exactly.
Mat eval_wiener(const WienerPlusFunction& f, cx s);

// Same, with the interpolant-exact transform; used by checks that probe the
// axis far beyond the sample Nyquist frequency.
Mat eval_wiener_filon(const WienerPlusFunction& f, cx s);

// Pointwise product (A B)(s); constants multiply exactly, kernels combine via
// one convolution plus the two cross terms.
WienerPlusFunction multiply(const WienerPlusFunction& a, const WienerPlusFunction& b);

WienerPlusFunction add(const WienerPlusFunction& a, const WienerPlusFunction& b);

}  // namespace wbz

#endif
