#include "wbz/freqint.hpp"

namespace wbz {

namespace {

// Least-squares fit of f ~ c2/omega^2 + c3/omega^3 on one side of the last
// decade, integrated analytically past the grid edge.
template <class T>
T side_tail(const std::vector<double>& w, const std::vector<T>& values, double lo, bool positive,
            double omega_max) {
  double s11 = 0.0, s12 = 0.0, s22 = 0.0;
  T b1{}, b2{};
  int count = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    const bool in = positive ? w[i] >= lo : w[i] <= -lo;
    if (!in) continue;
    const double x = 1.0 / w[i];
    const double p1 = x * x, p2 = x * x * x;
    s11 += p1 * p1;
    s12 += p1 * p2;
    s22 += p2 * p2;
    b1 += p1 * values[i];
    b2 += p2 * values[i];
    ++count;
  }
  if (count < 2) return T{};
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) < 1e-300) return T{};
  T c2 = (s22 * b1 - s12 * b2) / det;
  T c3 = (s11 * b2 - s12 * b1) / det;
  // integral of c2/w^2 + c3/w^3 over the missing half line
  if (positive) return c2 / omega_max + c3 / (2.0 * omega_max * omega_max);
  return c2 / omega_max - c3 / (2.0 * omega_max * omega_max);
}

template <class T>
T integrate_impl(const FrequencyGrid& grid, const std::vector<T>& values) {
  const auto& w = grid.omegas;
  if (values.size() != w.size()) throw std::invalid_argument("freq_integral: value count mismatch");
  T trapz{};
  for (size_t i = 0; i + 1 < w.size(); ++i)
    trapz += 0.5 * (w[i + 1] - w[i]) * (values[i] + values[i + 1]);
  const double omega_max = grid.omega_max();
  const double lo = omega_max / 10.0;
  T tail = side_tail(w, values, lo, true, omega_max) + side_tail(w, values, lo, false, omega_max);
  return (trapz + tail) / (2.0 * M_PI);
}

}  // namespace

double freq_integral(const FrequencyGrid& grid, const std::vector<double>& values) {
  return integrate_impl(grid, values);
}

cx freq_integral(const FrequencyGrid& grid, const std::vector<cx>& values) {
  return integrate_impl(grid, values);
}

std::vector<Mat> inverse_transform(const std::function<Mat(double)>& fhat, int rows, int cols,
                                   double t0, double dt, int count,
                                   const InverseTransformParams& params) {
  const int half = static_cast<int>(std::ceil(params.omega_max / params.step));
  const double step = params.omega_max / half;
  std::vector<Mat> out(count, Mat::Zero(rows, cols));
  if (rows == 0 || cols == 0) return out;
  for (int k = -half; k <= half; ++k) {
    const double omega = k * step;
    const double w = (k == -half || k == half) ? 0.5 * step : step;
    const Mat val = (w / (2.0 * M_PI)) * fhat(omega);
    // e^{i omega t} by recurrence along the uniform time grid
    cx phase = std::exp(cx(0.0, omega * t0));
    const cx ratio = std::exp(cx(0.0, omega * dt));
    for (int j = 0; j < count; ++j) {
      out[j] += phase * val;
      phase *= ratio;
    }
  }
  return out;
}

}  // namespace wbz
