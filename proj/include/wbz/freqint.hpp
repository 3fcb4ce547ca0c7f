#ifndef WBZ_FREQINT_HPP
#define WBZ_FREQINT_HPP

#include <functional>

#include "wbz/types.hpp"

namespace wbz {

// (1/2pi) * integral over the real line, trapezoid on the grid plus an
// analytic tail assuming the integrand decays like c/omega^2; c is fitted
// per side on the last decade of the grid.
double freq_integral(const FrequencyGrid& grid, const std::vector<double>& values);
cx freq_integral(const FrequencyGrid& grid, const std::vector<cx>& values);

// Internal quadrature grid for inverse transforms. The step keeps the
// periodization period well beyond the time window.
struct InverseTransformParams {
  double omega_max = 400.0;
  double step = 0.05;
  static InverseTransformParams for_horizon(double t_max) {
    InverseTransformParams p;
    p.step = std::min(0.05, M_PI / (2.0 * (t_max + 1.0)));
    return p;
  }
};

// m(t_k) = (1/2pi) * integral of fhat(omega) e^{i omega t_k} d omega for
// uniformly spaced times, by direct trapezoid quadrature on a dense grid.
std::vector<Mat> inverse_transform(const std::function<Mat(double)>& fhat, int rows, int cols,
                                   double t0, double dt, int count, const InverseTransformParams& params);

}  // namespace wbz

#endif
