#ifndef WBZ_TYPES_HPP
#define WBZ_TYPES_HPP

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wbz {

using cx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Uniform grid t = 0, h, ..., (n-1)h on which kernels are sampled.
struct TimeGrid {
  double h = 0.0;
  int n = 0;

  TimeGrid() = default;
  TimeGrid(double step, int count) : h(step), n(count) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("TimeGrid: step must be positive");
    if (n < 2) throw std::invalid_argument("TimeGrid: need at least two samples");
  }
  static TimeGrid from_horizon(double step, double horizon) {
    int count = static_cast<int>(std::lround(horizon / step)) + 1;
    return TimeGrid(step, count);
  }

  double horizon() const { return h * (n - 1); }
  double t(int i) const { return h * i; }
  // Composite trapezoid weight for node i on [0, horizon].
  double weight(int i) const { return (i == 0 || i == n - 1) ? 0.5 * h : h; }
  std::vector<double> weights() const {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = weight(i);
    return w;
  }
  std::vector<double> sqrt_weights() const {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = std::sqrt(weight(i));
    return w;
  }
  // Same horizon, half the step.
  TimeGrid refined() const { return TimeGrid(h / 2.0, 2 * n - 1); }

  bool operator==(const TimeGrid& o) const { return h == o.h && n == o.n; }
  bool operator!=(const TimeGrid& o) const { return !(*this == o); }
};

// Symmetric sample set on the imaginary axis, always containing 0 and +-omega_max.
struct FrequencyGrid {
  std::vector<double> omegas;

  static FrequencyGrid symmetric(double omega_max, int count) {
    if (!(omega_max > 0.0)) throw std::invalid_argument("FrequencyGrid: omega_max must be positive");
    if (count < 3 || count % 2 == 0)
      throw std::invalid_argument("FrequencyGrid: count must be odd and >= 3 so the grid contains 0");
    FrequencyGrid g;
    g.omegas.resize(count);
    const int half = count / 2;
    const double step = omega_max / half;
    for (int i = 0; i < count; ++i) g.omegas[i] = (i - half) * step;
    g.omegas[half] = 0.0;  // exact zero
    return g;
  }

  int size() const { return static_cast<int>(omegas.size()); }
  double omega_max() const { return omegas.back(); }
  double max_step() const {
    double m = 0.0;
    for (size_t i = 1; i < omegas.size(); ++i) m = std::max(m, omegas[i] - omegas[i - 1]);
    return m;
  }
};

inline cx infinity_point() {
  return cx(std::numeric_limits<double>::infinity(), 0.0);
}
inline bool is_infinity_point(cx s) { return std::isinf(s.real()); }

// Largest singular value of a small dense matrix.
inline double spectral_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  return a.jacobiSvd().singularValues()(0);
}

}  // namespace wbz

#endif
