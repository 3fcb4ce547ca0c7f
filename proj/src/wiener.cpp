#include "wbz/wiener.hpp"

namespace wbz {

WienerPlusFunction::WienerPlusFunction(Mat constant, CausalKernel kernel)
    : constant_(std::move(constant)), kernel_(std::move(kernel)) {
  if (!constant_.allFinite()) throw std::invalid_argument("WienerPlusFunction: non-finite constant");
  if (kernel_.rows() != constant_.rows() || kernel_.cols() != constant_.cols())
    throw std::invalid_argument("WienerPlusFunction: constant and kernel shapes differ");
}

WienerPlusFunction WienerPlusFunction::constant_only(Mat constant, const TimeGrid& grid) {
  const int r = static_cast<int>(constant.rows());
  const int c = static_cast<int>(constant.cols());
  return WienerPlusFunction(std::move(constant), CausalKernel::zero(r, c, grid));
}

Mat eval_wiener(const WienerPlusFunction& f, cx s) {
  if (is_infinity_point(s)) return f.at_infinity();
  if (f.cols() == 0 || f.rows() == 0) return Mat::Zero(f.rows(), f.cols());
  return f.at_infinity() + eval_transform(f.kernel(), s);
}

Mat eval_wiener_filon(const WienerPlusFunction& f, cx s) {
  if (is_infinity_point(s)) return f.at_infinity();
  if (f.cols() == 0 || f.rows() == 0) return Mat::Zero(f.rows(), f.cols());
  return f.at_infinity() + eval_transform_filon(f.kernel(), s);
}

WienerPlusFunction multiply(const WienerPlusFunction& a, const WienerPlusFunction& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions do not match");
  if (a.grid() != b.grid()) throw std::invalid_argument("multiply: functions live on different grids");
  Mat constant = a.at_infinity() * b.at_infinity();
  CausalKernel cross = add(a.kernel().right_multiplied(b.at_infinity()),
                           b.kernel().left_multiplied(a.at_infinity()));
  CausalKernel kernel = add(cross, convolve(a.kernel(), b.kernel()));
  return WienerPlusFunction(std::move(constant), std::move(kernel));
}

WienerPlusFunction add(const WienerPlusFunction& a, const WienerPlusFunction& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("add: dimension mismatch");
  return WienerPlusFunction(a.at_infinity() + b.at_infinity(), add(a.kernel(), b.kernel()));
}

}  // namespace wbz
