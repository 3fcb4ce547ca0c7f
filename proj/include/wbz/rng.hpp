#ifndef WBZ_RNG_HPP
#define WBZ_RNG_HPP

#include <random>

#include "wbz/types.hpp"

namespace wbz {

// Deterministic generator. Gaussian draws go through an explicit Box-Muller
// so sequences do not depend on the standard library's distribution
// implementation.
class Rng {
 public:
  explicit Rng(unsigned seed) : gen_(seed) {}

  double uniform() {
    // (0, 1]
    return (static_cast<double>(gen_()) + 1.0) / (static_cast<double>(std::mt19937::max()) + 1.0);
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double gaussian() {
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  cx cgaussian() { return cx(gaussian(), gaussian()) / std::sqrt(2.0); }

  Mat cgaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = cgaussian();
    return m;
  }

  Vec cgaussian_vector(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cgaussian();
    return v;
  }

  Vec unit_vector(Eigen::Index n) {
    Vec v = cgaussian_vector(n);
    return v / v.norm();
  }

 private:
  std::mt19937 gen_;
};

inline constexpr unsigned kIterationSeed = 0x5eed0b1u;

}  // namespace wbz

#endif
